//! Point, curve-centered and weight-2 blow-ups in monomial charts.
//!
//! A chart is a monomial map `x_i = prod_j t_j^{M[i][j]}`. The pull-back of
//! `sum F_i d/dx_i` is `dt_j/dt = t_j sum_i (M^-1)[j][i] F_i(pi) / pi_i`, which
//! is assembled over the least monomial denominator and divided exactly.

use std::fmt;

use crate::algebra::{Exp, MSeries, Scalar, Var};
use crate::error::{Error, Result};
use crate::vfield::{factor_divisor, PolyMap, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartKind {
    PointChartX,
    PointChartY,
    PointChartZ,
    CurveChartFirst,
    CurveChartSecond,
    Weight2,
}

impl ChartKind {
    pub fn name(self) -> &'static str {
        match self {
            ChartKind::PointChartX => "point_chart_x",
            ChartKind::PointChartY => "point_chart_y",
            ChartKind::PointChartZ => "point_chart_z",
            ChartKind::CurveChartFirst => "curve_chart_first",
            ChartKind::CurveChartSecond => "curve_chart_second",
            ChartKind::Weight2 => "weight2",
        }
    }
}

/// A monomial chart. Chart coordinates reuse the slots of `x, y, z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartMap {
    pub kind: ChartKind,
    /// Row `i` is the exponent vector of the monomial substituted for `x_i`.
    pub exponents: [Exp; 3],
    pub divisor_var: Var,
    /// Center axis for curve-centered and weight-2 charts.
    pub center_axis: Option<Var>,
}

fn transverse_pair(axis: Var) -> (Var, Var) {
    match axis {
        Var::X => (Var::Y, Var::Z),
        Var::Y => (Var::X, Var::Z),
        Var::Z => (Var::X, Var::Y),
    }
}

fn identity_exponents() -> [Exp; 3] {
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
}

impl ChartMap {
    /// One-point blow-up chart where `v` stays and the other coordinates are
    /// divided by it, e.g. `Z`: `(x, y, z) = (uz, vz, z)`.
    pub fn point(v: Var) -> Self {
        let mut exponents = identity_exponents();
        for (i, row) in exponents.iter_mut().enumerate() {
            if i != v.index() {
                row[v.index()] = 1;
            }
        }
        let kind = match v {
            Var::X => ChartKind::PointChartX,
            Var::Y => ChartKind::PointChartY,
            Var::Z => ChartKind::PointChartZ,
        };
        ChartMap { kind, exponents, divisor_var: v, center_axis: None }
    }

    /// Blow-up of a coordinate axis, in the chart where the transverse
    /// coordinate `divided` is replaced by `divided * other`.
    pub fn curve(axis: Var, divided: Var) -> Result<Self> {
        let (p, q) = transverse_pair(axis);
        let (kind, keep) = if divided == p {
            (ChartKind::CurveChartFirst, q)
        } else if divided == q {
            (ChartKind::CurveChartSecond, p)
        } else {
            return Err(Error::CenterNotInvariantOrNotSingular(format!("{} is not transverse to the {}-axis", divided, axis)));
        };
        let mut exponents = identity_exponents();
        exponents[divided.index()][keep.index()] = 1;
        Ok(ChartMap { kind, exponents, divisor_var: keep, center_axis: Some(axis) })
    }

    /// `(x, y, z) = (x, yz, z)` for the `x`-axis.
    pub fn curve_first(axis: Var) -> Self {
        ChartMap::curve(axis, transverse_pair(axis).0).expect("transverse")
    }

    /// `(x, y, z) = (x, y, zy)` for the `x`-axis.
    pub fn curve_second(axis: Var) -> Self {
        ChartMap::curve(axis, transverse_pair(axis).1).expect("transverse")
    }

    /// `(x, y, z) = (u, vw, w^2)`, centered at `{y = z = 0}`.
    pub fn weight2() -> Self {
        ChartMap {
            kind: ChartKind::Weight2,
            exponents: [[1, 0, 0], [0, 1, 1], [0, 0, 2]],
            divisor_var: Var::Z,
            center_axis: Some(Var::X),
        }
    }

    /// The substitution as series at truncation `t`.
    pub fn substitution(&self, t: u32) -> PolyMap {
        self.exponents.map(|e| MSeries::monomial(e, Scalar::one(), t))
    }

    /// `M^-1` over the rationals.
    pub fn inverse_exponents(&self) -> [[Scalar; 3]; 3] {
        let m = self.exponents.map(|r| r.map(|e| Scalar::from_int(e as i64)));
        let cof = |r: usize, c: usize| {
            let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
            let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
            &m[r1][c1] * &m[r2][c2] - &m[r1][c2] * &m[r2][c1]
        };
        let det = (0..3).fold(Scalar::zero(), |acc, c| acc + &m[0][c] * &cof(0, c));
        let mut inv: [[Scalar; 3]; 3] = Default::default();
        for (r, row) in inv.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = &cof(c, r) / &det;
            }
        }
        inv
    }
}

impl fmt::Display for ChartMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(|e| MSeries::monomial(*e, Scalar::one(), 4).to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupResult {
    /// Foliation representative in the chart: `raw = divisor^e * y`.
    pub y: VectorField,
    /// The un-factored pull-back.
    pub raw: VectorField,
    pub divisor_exponent: u32,
    pub dicritical: bool,
    pub chart: ChartMap,
}

/// The pull-back of `x` through `chart`, before any divisor is factored.
pub fn pullback(x: &VectorField, chart: &ChartMap) -> Result<VectorField> {
    let t = x.trunc();
    let subs = chart.substitution(t + 2);
    let composed: Vec<MSeries> = x.comps().iter().map(|c| c.substitute(&subs)).collect::<Result<_>>()?;
    let minv = chart.inverse_exponents();
    let pi = &chart.exponents;
    let mut out: Vec<MSeries> = Vec::with_capacity(3);
    for j in 0..3 {
        let mut tj = [0u32; 3];
        tj[j] = 1;
        let mut den = [0u32; 3];
        for i in (0..3).filter(|&i| !minv[j][i].is_zero()) {
            for s in 0..3 {
                den[s] = den[s].max(pi[i][s].saturating_sub(tj[s]));
            }
        }
        let mut num = MSeries::zero(t);
        for i in (0..3).filter(|&i| !minv[j][i].is_zero()) {
            let shift: Exp = std::array::from_fn(|s| tj[s] + den[s] - pi[i][s]);
            num = num.add(&composed[i].mul_monomial(&shift).scale(&minv[j][i]));
        }
        out.push(num.divide_by_monomial(&den)?);
    }
    let [a, b, c]: [MSeries; 3] = out.try_into().expect("three components");
    Ok(VectorField::new(a, b, c))
}

fn factored(raw: VectorField, chart: &ChartMap) -> BlowupResult {
    let v = chart.divisor_var;
    let (e, y) = factor_divisor(&raw, v);
    let dicritical = y.comp(v).var_valuation(v) == Some(0);
    BlowupResult { y, raw, divisor_exponent: e, dicritical, chart: chart.clone() }
}

/// Blow-up of the origin, read in a point chart.
pub fn point_blowup(x: &VectorField, chart: &ChartMap) -> Result<BlowupResult> {
    if !matches!(chart.kind, ChartKind::PointChartX | ChartKind::PointChartY | ChartKind::PointChartZ) {
        return Err(Error::CenterNotInvariantOrNotSingular(format!("{} is not a point chart", chart.kind.name())));
    }
    if !x.is_singular() {
        return Err(Error::RegularPoint);
    }
    Ok(factored(pullback(x, chart)?, chart))
}

/// Blow-up along the coordinate axis of `chart`, which must lie in the
/// singular set of `x`.
pub fn curve_blowup(x: &VectorField, chart: &ChartMap) -> Result<BlowupResult> {
    let axis = match (chart.kind, chart.center_axis) {
        (ChartKind::CurveChartFirst | ChartKind::CurveChartSecond, Some(a)) => a,
        _ => return Err(Error::CenterNotInvariantOrNotSingular(format!("{} is not a curve chart", chart.kind.name()))),
    };
    for v in Var::ALL {
        let r = x.comp(v).restrict_to_axis(axis);
        if let Some(k) = r.coeffs().iter().position(|c| !c.is_zero()) {
            return Err(Error::CenterNotInvariantOrNotSingular(format!(
                "d/d{} component restricted to the {}-axis has coefficient {} at degree {}",
                v, axis, r.coeffs()[k], k
            )));
        }
    }
    Ok(factored(pullback(x, chart)?, chart))
}

/// Decomposition `X = z^k h [(y + z f) d/dx + z g d/dy + z^n d/dz]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormData {
    pub k: u32,
    pub n: u32,
    /// The unit `h`.
    pub unit: MSeries,
    /// The bracketed field.
    pub bracket: VectorField,
    pub f: MSeries,
    pub g: MSeries,
}

/// Recognizes the ledgered normal form along the `z`-axis.
pub fn normal_form_data(x: &VectorField) -> Result<NormalFormData> {
    let nf = |m: &str| Error::NotInNormalForm(m.to_string());
    let (k, w) = factor_divisor(x, Var::Z);
    let wz = w.comp(Var::Z);
    let n = wz.var_valuation(Var::Z).ok_or_else(|| nf("d/dz component vanishes at trusted precision"))?;
    let h = wz.divide_by_monomial(&[0, 0, n])?;
    if h.constant_term().is_zero() {
        return Err(nf("d/dz component is not a unit times a power of z"));
    }
    if n < 2 {
        return Err(nf("d/dz component has z-order below 2"));
    }
    let hinv = h.inverse_unit()?;
    let bracket = w.mul_series(&hinv);
    let y = MSeries::var(Var::Y, bracket.trunc());
    let f = bracket
        .comp(Var::X)
        .sub(&y)
        .divide_by_variable(Var::Z)
        .map_err(|_| nf("d/dx component minus y is not divisible by z"))?;
    let g = bracket.comp(Var::Y).divide_by_variable(Var::Z).map_err(|_| nf("d/dy component is not divisible by z"))?;
    Ok(NormalFormData { k, n, unit: h, bracket, f, g })
}

/// Weight-2 blow-up along `{y = z = 0}` of a field in normal form.
pub fn weight2_blowup(x: &VectorField) -> Result<BlowupResult> {
    normal_form_data(x)?;
    let chart = ChartMap::weight2();
    Ok(factored(pullback(x, &chart)?, &chart))
}

/// Dispatches on the chart kind.
pub fn blowup(x: &VectorField, chart: &ChartMap) -> Result<BlowupResult> {
    match chart.kind {
        ChartKind::PointChartX | ChartKind::PointChartY | ChartKind::PointChartZ => point_blowup(x, chart),
        ChartKind::CurveChartFirst | ChartKind::CurveChartSecond => curve_blowup(x, chart),
        ChartKind::Weight2 => weight2_blowup(x),
    }
}
