use thiserror::Error;

use crate::algebra::Var;

/// Errors raised by the workbench operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("substituted series {index} has a nonzero constant term")]
    NonzeroConstantTerm { index: usize },
    #[error("not divisible by {var}: witness term {witness}")]
    NotDivisible { var: Var, witness: String },
    #[error("only {found} nonzero coefficients on the stride, need at least 4")]
    InsufficientSupport { found: usize },
    #[error("series is not a unit (zero constant term)")]
    NotAUnit,
    #[error("vector field vanishes identically at trusted precision")]
    AllZero,
    #[error("linear part of the coordinate change is not invertible")]
    NonInvertibleLinearPart,
    #[error("blow-up refused: the origin is a regular point")]
    RegularPoint,
    #[error("center axis is not contained in the singular set: {0}")]
    CenterNotInvariantOrNotSingular(String),
    #[error("field is not in the persistent normal form: {0}")]
    NotInNormalForm(String),
    #[error("curve is not a separatrix: residual vanishes only below degree {order} (trusted through {trunc})")]
    NotASeparatrix { order: u32, trunc: u32 },
    #[error("field vanishes identically along the curve at trusted precision")]
    ZeroAlongCurve,
    #[error("separatrix equations obstructed at degree {degree}: {witness}")]
    Obstructed { degree: u32, witness: String },
    #[error("field does not parameterize a graph separatrix: {0}")]
    NotGraphParameterizable(String),
    #[error("curve does not pass through the blow-up center")]
    CurveMissesCenter,
    #[error("curve transform needs a division that is not exact: {0}")]
    DivisionObstructed(String),
    #[error("curve is not a graph over the z-axis")]
    NotGraph,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("integrand has a pole on the path")]
    PoleOnPath,
    #[error("numerical integration failed: {0}")]
    IntegrationFailure(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("no persistent normal form: {0}")]
    NoMatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
