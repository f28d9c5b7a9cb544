//! Blow-ups, formal separatrices, multiplicities and semicompleteness tests
//! for one-dimensional holomorphic foliations at a singular point of `C^3`.
//!
//! All symbolic work is exact over the Gaussian rationals; numeric checks
//! (quadrature, monodromy integration) only validate exact verdicts.

pub mod algebra;
pub mod blowup;
pub mod error;
pub mod resolve;
pub mod separatrix;
pub mod vfield;

pub use algebra::{ratio_divergence_estimate, DivergenceReport, Exp, MSeries, Scalar, USeries, Valuation, Var};
pub use blowup::{blowup, curve_blowup, point_blowup, pullback, weight2_blowup, BlowupResult, ChartKind, ChartMap};
pub use error::{Error, Result};
pub use separatrix::{
    invariance_residual, multiplicity, solve_graph_separatrix, solve_separatrix_along, straighten, transform_curve, FormalCurve,
    Residual,
};
pub use vfield::{classify, order_at_origin, order_wrt_curve, SingularityClass, SingularityTag, VectorField};
pub use resolve::{
    analyze, detect_persistent_normal_form, driver_step, holonomy_sancho_sanz, normalize_curve, resolve_along,
    sancho_sanz_parameters, semicomplete_obstruction, timeform_arc_integral, zflow_uniformity_check, AnalyzeOptions, Analysis,
    Holonomy, Outcome, PersistentReport, ResolutionTrace, Rho, SeparatrixSource, StepRecord, Verdict, ZflowReport,
};
