//! Exact coefficient field and truncated power series.
//!
//! Every series carries `trunc`, its last trusted degree. Results of arithmetic
//! carry the pessimistic ledger:
//!
//! - sums and products keep `min` of the operand truncations;
//! - substitution of series with zero constant term keeps `min(s.trunc, subs)`;
//! - differentiation or division by a variable lowers `trunc` by one.

mod divergence;
mod mseries;
mod scalar;
mod useries;

use std::fmt;

pub use divergence::{ratio_divergence_estimate, DivergenceReport};
pub use mseries::{Exp, MSeries};
pub use scalar::Scalar;
pub use useries::USeries;

/// Coordinate variable of `C^3`. Chart coordinates reuse the slot of the
/// variable they replace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Var {
        Var::ALL[i]
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z"][self.index()]
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Order of a series: a finite degree, or `Infinite` when every trusted
/// coefficient vanishes (read as "at least trunc + 1").
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }

    /// Saturating shift; `Infinite` stays `Infinite`.
    pub fn minus(self, k: u32) -> Valuation {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v.saturating_sub(k)),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{}", v),
            Valuation::Infinite => f.write_str("INFINITE"),
        }
    }
}
