use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Holonomy of the invariant axis for the family
/// `x^2 d/dx + (xz - a xy) d/dy + (y - b xz) d/dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct Holonomy {
    /// `exp` of `[[-2 pi i a, 2 pi i], [0, -2 pi i b]]`, row-major.
    pub matrix: [[Complex64; 2]; 2],
    pub is_identity: bool,
}

/// `e^{-2 pi i q}` with `q` reduced mod 1 exactly first.
fn unit_root(q: &BigRational) -> Complex64 {
    let frac = q - q.floor();
    if frac.is_zero() {
        return Complex64::new(1.0, 0.0);
    }
    let f = frac.numer().to_f64().unwrap_or(0.0) / frac.denom().to_f64().unwrap_or(1.0);
    let (s, c) = (TAU * f).sin_cos();
    Complex64::new(c, -s)
}

pub fn holonomy_sancho_sanz(alpha: &BigRational, beta: &BigRational) -> Holonomy {
    let ea = unit_root(alpha);
    let eb = unit_root(beta);
    let zero = Complex64::new(0.0, 0.0);
    let off = if alpha != beta {
        let d = (alpha - beta).to_f64().unwrap_or(f64::NAN);
        (eb - ea) / d
    } else {
        Complex64::new(0.0, TAU) * ea
    };
    let is_identity = alpha.is_integer() && beta.is_integer() && alpha != beta;
    Holonomy { matrix: [[ea, off], [zero, eb]], is_identity }
}

impl Holonomy {
    /// Max-entry distance from the identity matrix.
    pub fn distance_from_identity(&self) -> f64 {
        let id = [[1.0, 0.0], [0.0, 1.0]];
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.matrix[r][c] - Complex64::new(id[r][c], 0.0)).norm());
            }
        }
        d
    }
}
