//! Resolution driver along a separatrix, persistent nilpotent normal forms,
//! semicompleteness verdicts, holonomy and time-form checks.

mod holonomy;
mod timeform;
mod zflow;

pub use holonomy::{holonomy_sancho_sanz, Holonomy};
pub use timeform::{timeform_arc_integral, Rho};
pub use zflow::{zflow_uniformity_check, ZflowReport};

use num_rational::BigRational;

use crate::algebra::{MSeries, Scalar, USeries, Valuation, Var};
use crate::blowup::{normal_form_data, point_blowup, BlowupResult, ChartMap};
use crate::error::{Error, Result};
use crate::separatrix::{
    invariance_residual, multiplicity, solve_separatrix_along, straighten, transform_curve, FormalCurve,
};
use crate::vfield::{axis_to_z, classify, conjugate, SingularityClass, SingularityTag, VectorField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    /// Chart of the blow-up that produced this point; `None` at the start.
    pub chart: Option<ChartMap>,
    pub class: SingularityClass,
    pub mult: u32,
    pub divisor_exponent: u32,
    pub tangency: Valuation,
    pub trunc: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    ReachedElementary,
    ReachedRegular,
    PersistentNormalFormMatched,
    MaxStepsExhausted,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::ReachedElementary => "reached_elementary",
            Outcome::ReachedRegular => "reached_regular",
            Outcome::PersistentNormalFormMatched => "persistent_normal_form_matched",
            Outcome::MaxStepsExhausted => "max_steps_exhausted",
        }
    }
}

/// Steps are recorded in coordinates where the separatrix is a graph over
/// `z`; `axis` is the original coordinate moved to the `z` slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionTrace {
    pub axis: Var,
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NotSemicomplete,
    Inconclusive,
    SemicompleteByHolonomy,
    NotSemicompleteByHolonomy,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::NotSemicomplete => "not_semicomplete",
            Verdict::Inconclusive => "inconclusive",
            Verdict::SemicompleteByHolonomy => "semicomplete_by_holonomy",
            Verdict::NotSemicompleteByHolonomy => "not_semicomplete_by_holonomy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersistentReport {
    /// Exponent of `z^n` in the `d/dz` component, equal to the multiplicity.
    pub n: u32,
    pub lambda: Scalar,
    /// Exponent of the divisor factor `z^k`.
    pub k: u32,
    pub separatrix_prefix: FormalCurve,
    pub tangency: Valuation,
    pub verdict: Option<Verdict>,
}

/// Moves the valuation-one direction of `phi` to `z` (preferring `z`, then
/// `x`, then `y`) and reparameterizes it as a graph.
pub fn normalize_curve(phi: &FormalCurve) -> Result<(Var, FormalCurve)> {
    let axis = [Var::Z, Var::X, Var::Y]
        .into_iter()
        .find(|&v| phi.component(v).valuation() == Valuation::Finite(1))
        .ok_or(Error::NotGraph)?;
    Ok((axis, phi.permuted(axis_to_z(axis)).as_graph_over(Var::Z)?))
}

/// One step of the driver on a graph curve over `z`: shear the tangent
/// direction of the curve onto the `z`-axis, blow up the origin in the `z`
/// chart and take the strict transform.
pub fn driver_step(x: &VectorField, phi: &FormalCurve) -> Result<(BlowupResult, FormalCurve)> {
    if !phi.is_graph_over_z() {
        return Err(Error::NotGraph);
    }
    if x.trunc() < 2 || phi.trunc() < 2 {
        return Err(Error::PrecisionExhausted(format!(
            "blow-up needs trunc >= 2 (field {}, curve {})",
            x.trunc(),
            phi.trunc()
        )));
    }
    let a1 = phi.component(Var::X).coeff(1).clone();
    let b1 = phi.component(Var::Y).coeff(1).clone();
    let (x, phi) = if a1.is_zero() && b1.is_zero() {
        (x.clone(), phi.clone())
    } else {
        let t = x.trunc() + 1;
        let z = MSeries::var(Var::Z, t);
        let shear = [
            MSeries::var(Var::X, t).add(&z.scale(&a1)),
            MSeries::var(Var::Y, t).add(&z.scale(&b1)),
            z.clone(),
        ];
        let tt = USeries::t(phi.trunc());
        let curve = FormalCurve::graph(
            phi.component(Var::X).sub(&tt.scale(&a1)),
            phi.component(Var::Y).sub(&tt.scale(&b1)),
        );
        (conjugate(x, &shear)?, curve)
    };
    let chart = ChartMap::point(Var::Z);
    let r = point_blowup(&x, &chart)?;
    let psi = transform_curve(&phi, &chart)?;
    Ok((r, psi))
}

fn record(x: &VectorField, phi: &FormalCurve, chart: Option<ChartMap>, e: u32) -> Result<StepRecord> {
    let mult = match multiplicity(x, phi) {
        // the multiplicity stays finite under blow-ups, so a transform that
        // vanishes along the curve has run out of trusted terms
        Err(Error::ZeroAlongCurve) if chart.is_some() => {
            return Err(Error::PrecisionExhausted(format!(
                "transformed field vanishes along the curve through degree {}",
                x.trunc().min(phi.trunc())
            )))
        }
        m => m?,
    };
    Ok(StepRecord {
        chart,
        class: classify(x),
        mult,
        divisor_exponent: e,
        tangency: phi.tangency(),
        trunc: x.trunc().min(phi.trunc()),
    })
}

fn terminal(class: &SingularityClass) -> Option<Outcome> {
    match class.tag {
        SingularityTag::Regular => Some(Outcome::ReachedRegular),
        SingularityTag::Elementary => Some(Outcome::ReachedElementary),
        _ => None,
    }
}

/// Follows `phi` through successive point blow-ups until the point becomes
/// regular or elementary, or `max_steps` blow-ups have been made.
pub fn resolve_along(x: &VectorField, phi: &FormalCurve, max_steps: u32) -> Result<ResolutionTrace> {
    let (axis, mut phi) = normalize_curve(phi)?;
    let mut x = x.permuted(axis_to_z(axis));
    let mut steps = vec![record(&x, &phi, None, 0)?];
    for _ in 0..max_steps {
        if let Some(outcome) = terminal(&steps.last().expect("nonempty").class) {
            return Ok(ResolutionTrace { axis, steps, outcome });
        }
        let (r, psi) = driver_step(&x, &phi)?;
        x = r.y;
        phi = psi;
        steps.push(record(&x, &phi, Some(r.chart), r.divisor_exponent)?);
    }
    let outcome = terminal(&steps.last().expect("nonempty").class).unwrap_or(Outcome::MaxStepsExhausted);
    Ok(ResolutionTrace { axis, steps, outcome })
}

/// Matches `z^k h [(y + z f) d/dx + z g d/dy + z^n d/dz]` with `n >= 2`,
/// `dg/dx(0) != 0` and a graph separatrix through degree `n_degree` tangent
/// to the `z`-axis.
pub fn detect_persistent_normal_form(x: &VectorField, n_degree: u32) -> Result<PersistentReport> {
    let nf = normal_form_data(x).map_err(|e| match e {
        Error::NotInNormalForm(m) => Error::NoMatch(m),
        other => Error::NoMatch(other.to_string()),
    })?;
    let lambda = nf.g.coeff(&[1, 0, 0]);
    if lambda.is_zero() {
        return Err(Error::NoMatch("lambda = dg/dx(0) vanishes".into()));
    }
    let phi = solve_separatrix_along(&nf.bracket, Var::Z, n_degree)
        .map_err(|e| Error::NoMatch(format!("no graph separatrix over z: {}", e)))?;
    let tangency = phi.tangency();
    if tangency < Valuation::Finite(2) {
        return Err(Error::NoMatch("separatrix is not tangent to the z-axis".into()));
    }
    Ok(PersistentReport { n: nf.n, lambda, k: nf.k, separatrix_prefix: phi, tangency, verdict: None })
}

pub fn semicomplete_obstruction(report: &PersistentReport) -> Verdict {
    if report.n >= 3 || report.k >= 1 {
        Verdict::NotSemicomplete
    } else {
        Verdict::Inconclusive
    }
}

/// `(a, b)` when `x` is exactly `x^2 d/dx + (xz - a xy) d/dy + (y - b xz) d/dz`
/// with rational `a, b`.
pub fn sancho_sanz_parameters(x: &VectorField) -> Option<(BigRational, BigRational)> {
    let a = -x.comp(Var::Y).coeff(&[1, 1, 0]);
    let b = -x.comp(Var::Z).coeff(&[1, 0, 1]);
    if !a.is_real() || !b.is_real() {
        return None;
    }
    let t = x.trunc();
    let expect = VectorField::new(
        MSeries::monomial([2, 0, 0], Scalar::one(), t),
        MSeries::from_terms([([1, 0, 1], Scalar::one()), ([1, 1, 0], -&a)], t),
        MSeries::from_terms([([0, 1, 0], Scalar::one()), ([1, 0, 1], -&b)], t),
    );
    (expect == *x).then(|| (a.re.clone(), b.re.clone()))
}

/// Where the separatrix comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparatrixSource {
    /// Solve for a graph separatrix over `z`, then `x`, then `y`.
    Solve,
    Axis(Var),
    Curve(FormalCurve),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub max_steps: u32,
    /// Degree to which separatrices are solved.
    pub degree: u32,
    /// Degree `m` of the straightening used before normal-form detection.
    pub straighten_degree: u32,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { max_steps: 8, degree: 24, straighten_degree: 8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub axis: Var,
    /// The separatrix in the input coordinates.
    pub separatrix: FormalCurve,
    pub trace: ResolutionTrace,
    pub report: Option<PersistentReport>,
    /// Reason for the last failed normal-form match, if none matched.
    pub no_match: Option<String>,
    pub verdict: Option<Verdict>,
    pub holonomy: Option<Holonomy>,
}

fn find_separatrix(x: &VectorField, source: &SeparatrixSource, degree: u32) -> Result<FormalCurve> {
    let check = |phi: FormalCurve| -> Result<FormalCurve> {
        let r = invariance_residual(x, &phi)?;
        match r.first_nonzero {
            Valuation::Infinite => Ok(phi),
            Valuation::Finite(order) => Err(Error::NotASeparatrix { order, trunc: r.trunc }),
        }
    };
    match source {
        SeparatrixSource::Axis(v) => check(FormalCurve::axis(*v, x.trunc())),
        SeparatrixSource::Curve(phi) => check(phi.clone()),
        SeparatrixSource::Solve => {
            let mut reasons = Vec::new();
            for axis in [Var::Z, Var::X, Var::Y] {
                match solve_separatrix_along(x, axis, degree) {
                    Ok(phi) => return Ok(phi),
                    Err(e) => reasons.push(format!("over {}: {}", axis, e)),
                }
            }
            Err(Error::NotGraphParameterizable(reasons.join("; ")))
        }
    }
}

/// Full pipeline: separatrix, resolution along it with normal-form detection
/// at every step, obstruction verdict and, for the holonomy family, the
/// holonomy verdict.
pub fn analyze(x: &VectorField, source: &SeparatrixSource, opts: &AnalyzeOptions) -> Result<Analysis> {
    let degree = opts.degree.min(x.trunc());
    let separatrix = find_separatrix(x, source, degree)?;
    let (axis, mut phi) = normalize_curve(&separatrix)?;
    let mut field = x.permuted(axis_to_z(axis));
    let mut steps = vec![record(&field, &phi, None, 0)?];
    let mut report = None;
    let mut no_match = None;
    let mut outcome = Outcome::MaxStepsExhausted;
    for step in 0..=opts.max_steps {
        if let Some(o) = terminal(&steps.last().expect("nonempty").class) {
            outcome = o;
            break;
        }
        let m = opts.straighten_degree.min(phi.trunc());
        let (straight, _) = straighten(&field, &phi, m)?;
        match detect_persistent_normal_form(&straight, degree.min(straight.trunc())) {
            Ok(r) => {
                report = Some(r);
                outcome = Outcome::PersistentNormalFormMatched;
                break;
            }
            Err(Error::NoMatch(reason)) => no_match = Some(reason),
            Err(e) => return Err(e),
        }
        if step == opts.max_steps {
            break;
        }
        let (r, psi) = driver_step(&field, &phi)?;
        field = r.y;
        phi = psi;
        steps.push(record(&field, &phi, Some(r.chart), r.divisor_exponent)?);
    }
    let mut verdict = None;
    let mut holonomy = None;
    if let Some(r) = report.as_mut() {
        let mut v = semicomplete_obstruction(r);
        if v == Verdict::Inconclusive {
            if let Some((a, b)) = sancho_sanz_parameters(x) {
                let h = holonomy_sancho_sanz(&a, &b);
                v = if h.is_identity { Verdict::SemicompleteByHolonomy } else { Verdict::NotSemicompleteByHolonomy };
                holonomy = Some(h);
            }
        }
        r.verdict = Some(v);
        verdict = Some(v);
        no_match = None;
    }
    Ok(Analysis {
        axis,
        separatrix,
        trace: ResolutionTrace { axis, steps, outcome },
        report,
        no_match,
        verdict,
        holonomy,
    })
}
