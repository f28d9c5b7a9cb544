//! Command implementations behind the `folia` binary. Every command returns
//! a JSON value with a fixed key order so output is byte-stable.

pub mod dsl;

use std::fmt;

use folia_core::blowup::weight2_blowup;
use folia_core::{
    analyze, classify, holonomy_sancho_sanz, curve_blowup, order_at_origin, point_blowup, timeform_arc_integral,
    zflow_uniformity_check, AnalyzeOptions, ChartMap, Error, FormalCurve, Holonomy, MSeries, Rho, Scalar, SeparatrixSource,
    Valuation, Var, VectorField,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Value};

pub use dsl::ParseError;

pub const DEFAULT_TRUNC: u32 = 24;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Parse(String),
    Precondition(Error),
    Precision(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Precision(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse_error",
            CliError::Precondition(_) => "precondition_violation",
            CliError::Precision(_) => "precision_exhausted",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error at {}", m),
            CliError::Precondition(e) | CliError::Precision(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::PrecisionExhausted(_) => CliError::Precision(e),
            e => CliError::Precondition(e),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

pub type CliResult = std::result::Result<Value, CliError>;

fn bad_arg(name: &str, msg: impl fmt::Display) -> CliError {
    CliError::Parse(format!("argument {}: {}", name, msg))
}

pub fn parse_var(name: &str, s: &str) -> Result<Var, CliError> {
    match s {
        "x" => Ok(Var::X),
        "y" => Ok(Var::Y),
        "z" => Ok(Var::Z),
        _ => Err(bad_arg(name, format!("expected x, y or z, found '{}'", s))),
    }
}

pub fn parse_rational(name: &str, s: &str) -> Result<BigRational, CliError> {
    let s = s.trim();
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|_| bad_arg(name, format!("'{}' is not a rational number", s)))?;
    let d: BigInt = d.trim().parse().map_err(|_| bad_arg(name, format!("'{}' is not a rational number", s)))?;
    if d == BigInt::from(0) {
        return Err(bad_arg(name, "zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

fn valuation_json(v: Valuation) -> Value {
    match v {
        Valuation::Finite(k) => json!(k),
        Valuation::Infinite => json!("infinite"),
    }
}

fn scalars_json(s: &[Scalar]) -> Value {
    Value::Array(s.iter().map(|c| json!(c.to_string())).collect())
}

fn complex_json(c: Complex64) -> Value {
    // adding 0.0 maps -0.0 to 0.0
    json!({ "re": c.re + 0.0, "im": c.im + 0.0 })
}

fn curve_json(phi: &FormalCurve) -> Value {
    let comp = |v: Var| scalars_json(phi.component(v).coeffs());
    json!({
        "text": dsl::print_curve(phi),
        "trunc": phi.trunc(),
        "x": comp(Var::X),
        "y": comp(Var::Y),
        "z": comp(Var::Z),
    })
}

fn components_json(x: &VectorField) -> Value {
    Value::Array(x.comps().iter().map(|c| json!(c.to_string())).collect())
}

fn holonomy_json(h: &Holonomy) -> Value {
    json!({
        "is_identity": h.is_identity,
        "matrix": h.matrix.iter().map(|r| r.iter().map(|&c| complex_json(c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn field_header(cmd: &str, x: &VectorField) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(cmd));
    m.insert("field".into(), json!(dsl::print_field(x)));
    m.insert("trunc".into(), json!(x.trunc()));
    m
}

pub fn cmd_classify(field: &str, trunc: u32) -> CliResult {
    let x = dsl::parse_field(field, trunc)?;
    let class = classify(&x);
    let order = order_at_origin(&x).ok();
    let mut out = field_header("classify", &x);
    out.insert("class".into(), json!(class.tag.name()));
    out.insert("order".into(), json!(order));
    out.insert(
        "linear_part".into(),
        Value::Array(x.linear_part().m.iter().map(|r| scalars_json(r)).collect()),
    );
    out.insert("invariant_triple".into(), scalars_json(&class.char_poly_invariants));
    Ok(Value::Object(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Center {
    Point,
    Curve,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupArgs {
    pub center: Center,
    /// Point center: the chart variable. Curve center: the divided transverse variable.
    pub chart: Var,
    /// Axis for a curve center.
    pub axis: Var,
    pub weight: u32,
}

pub fn cmd_blowup(field: &str, trunc: u32, args: &BlowupArgs) -> CliResult {
    let x = dsl::parse_field(field, trunc)?;
    let (center, r) = match (args.weight, args.center) {
        (2, _) => ("weight2", weight2_blowup(&x)?),
        (1, Center::Point) => ("point", point_blowup(&x, &ChartMap::point(args.chart))?),
        (1, Center::Curve) => ("curve", curve_blowup(&x, &ChartMap::curve(args.axis, args.chart)?)?),
        (w, _) => return Err(bad_arg("--weight", format!("expected 1 or 2, found {}", w))),
    };
    let class = classify(&r.y);
    let mut out = field_header("blowup", &x);
    out.insert("center".into(), json!(center));
    out.insert("center_axis".into(), json!(r.chart.center_axis.map(Var::name)));
    out.insert("chart".into(), json!(r.chart.to_string()));
    out.insert("chart_kind".into(), json!(r.chart.kind.name()));
    out.insert("components".into(), components_json(&r.y));
    out.insert("raw_components".into(), components_json(&r.raw));
    out.insert("divisor".into(), json!(r.chart.divisor_var.name()));
    out.insert("divisor_exponent".into(), json!(r.divisor_exponent));
    out.insert("dicritical".into(), json!(r.dicritical));
    out.insert("new_class".into(), json!(class.tag.name()));
    out.insert("new_invariant_triple".into(), scalars_json(&class.char_poly_invariants));
    out.insert("new_trunc".into(), json!(r.y.trunc()));
    Ok(Value::Object(out))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeparatrixArg {
    Solve,
    Axis(Var),
    /// Curve text `[x(t), y(t), z(t)]`.
    Curve(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolveArgs {
    pub separatrix: SeparatrixArg,
    pub max_steps: u32,
    pub degree: Option<u32>,
}

pub fn cmd_resolve(field: &str, trunc: u32, args: &ResolveArgs) -> CliResult {
    let x = dsl::parse_field(field, trunc)?;
    let (source_name, source) = match &args.separatrix {
        SeparatrixArg::Solve => ("solve", SeparatrixSource::Solve),
        SeparatrixArg::Axis(v) => ("axis", SeparatrixSource::Axis(*v)),
        SeparatrixArg::Curve(text) => {
            let c = dsl::parse_curve(text, trunc)?;
            ("file", SeparatrixSource::Curve(FormalCurve::new(c)?))
        }
    };
    let mut opts = AnalyzeOptions { max_steps: args.max_steps, ..AnalyzeOptions::default() };
    opts.degree = args.degree.unwrap_or(trunc.saturating_sub(2)).max(1);
    let a = analyze(&x, &source, &opts)?;
    let steps: Vec<Value> = a
        .trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            json!({
                "step": i,
                "chart": s.chart.as_ref().map(ChartMap::to_string),
                "class": s.class.tag.name(),
                "invariant_triple": scalars_json(&s.class.char_poly_invariants),
                "mult": s.mult,
                "divisor_exponent": s.divisor_exponent,
                "tangency": valuation_json(s.tangency),
                "trunc": s.trunc,
            })
        })
        .collect();
    let report = a.report.as_ref().map(|r| {
        json!({
            "n": r.n,
            "lambda": r.lambda.to_string(),
            "k": r.k,
            "tangency": valuation_json(r.tangency),
            "separatrix_prefix": curve_json(&r.separatrix_prefix),
        })
    });
    let mut out = field_header("resolve", &x);
    out.insert("separatrix_source".into(), json!(source_name));
    out.insert("max_steps".into(), json!(args.max_steps));
    out.insert("degree".into(), json!(opts.degree));
    out.insert("axis".into(), json!(a.axis.name()));
    out.insert("separatrix".into(), curve_json(&a.separatrix));
    out.insert("steps".into(), Value::Array(steps));
    out.insert("outcome".into(), json!(a.trace.outcome.name()));
    out.insert("report".into(), report.unwrap_or(Value::Null));
    out.insert("no_match".into(), json!(a.no_match));
    out.insert("verdict".into(), json!(a.verdict.map(|v| v.name())));
    out.insert("holonomy".into(), a.holonomy.as_ref().map(holonomy_json).unwrap_or(Value::Null));
    Ok(Value::Object(out))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZflowArgs {
    pub x0: Complex64,
    pub y0: Complex64,
    pub z0: Complex64,
}

pub fn cmd_holonomy(alpha: &str, beta: &str, zflow: Option<&ZflowArgs>) -> CliResult {
    let a = parse_rational("--alpha", alpha)?;
    let b = parse_rational("--beta", beta)?;
    let h = holonomy_sancho_sanz(&a, &b);
    let mut out = serde_json::Map::new();
    out.insert("command".into(), json!("holonomy"));
    out.insert("alpha".into(), json!(a.to_string()));
    out.insert("beta".into(), json!(b.to_string()));
    out.insert("is_identity".into(), json!(h.is_identity));
    out.insert("matrix".into(), holonomy_json(&h)["matrix"].clone());
    out.insert("distance_from_identity".into(), json!(h.distance_from_identity()));
    if let Some(z) = zflow {
        let r = zflow_uniformity_check(&a, &b, z.x0, [z.y0, z.z0])?;
        out.insert(
            "zflow".into(),
            json!({
                "x0": complex_json(z.x0),
                "y0z0": [complex_json(z.y0), complex_json(z.z0)],
                "end": [complex_json(r.end[0]), complex_json(r.end[1])],
                "gap": r.gap,
                "steps": r.steps,
            }),
        );
    }
    Ok(Value::Object(out))
}

pub fn cmd_timeform(rho: &str, x0: Complex64, turns: &str, trunc: u32) -> CliResult {
    let turns_q = parse_rational("--turns", turns)?;
    let series = dsl::parse_univariate(rho, 'x', trunc)?;
    let nonzero: Vec<u32> = (0..series.trunc()).filter(|&k| !series.coeff(k).is_zero()).collect();
    let rho_v = match nonzero.as_slice() {
        [m] if series.coeff(*m).is_one() => Rho::Monomial(*m),
        _ => Rho::Series(series.clone()),
    };
    let v = timeform_arc_integral(&rho_v, x0, &turns_q)?;
    let rho_text = MSeries::from_terms(
        series.coeffs().iter().enumerate().map(|(k, c)| ([k as u32, 0, 0], c.clone())),
        series.trunc() + 1,
    )
    .to_string();
    Ok(json!({
        "command": "timeform",
        "rho": rho_text,
        "x0": complex_json(x0),
        "turns": turns_q.to_string(),
        "integral": complex_json(v),
        "abs": v.norm(),
    }))
}
