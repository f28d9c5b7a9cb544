//! Fixed workloads shared by the benchmarks.

use folia_core::{MSeries, Scalar, Var, VectorField};

pub fn vars(t: u32) -> (MSeries, MSeries, MSeries) {
    (MSeries::var(Var::X, t), MSeries::var(Var::Y, t), MSeries::var(Var::Z, t))
}

/// `(1 + x + y + z)^d` minus its constant term, a dense series of degree `d`.
pub fn dense(d: u32, t: u32) -> MSeries {
    let (x, y, z) = vars(t);
    MSeries::one(t).add(&x).add(&y.scale(&Scalar::from_ratio(1, 2))).add(&z.scale(&Scalar::from_int(3))).pow(d).sub(&MSeries::one(t))
}

/// `(y - l z) d/dx + zx d/dy + z^3 d/dz`.
pub fn x_lambda(lam: i64, t: u32) -> VectorField {
    let (x, y, z) = vars(t);
    VectorField::new(y.sub(&z.scale(&Scalar::from_int(lam))), z.mul(&x), z.pow(3))
}
