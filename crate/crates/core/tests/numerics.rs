use std::f64::consts::TAU;

use folia_core::{holonomy_sancho_sanz, timeform_arc_integral, Error, Rho, Scalar, USeries};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

fn half_grid() -> Vec<BigRational> {
    (-4..=4).map(|k| BigRational::new(BigInt::from(k), BigInt::from(2))).collect()
}

#[test]
fn holonomy_matrix_agrees_with_exact_verdict() {
    for a in half_grid() {
        for b in half_grid() {
            let h = holonomy_sancho_sanz(&a, &b);
            let expect = a.is_integer() && b.is_integer() && a != b;
            assert_eq!(h.is_identity, expect, "({}, {})", a, b);
            assert_eq!(h.distance_from_identity() < 1e-12, expect, "({}, {})", a, b);
        }
    }
}

#[test]
fn monomial_arcs_close_up() {
    for l in 1..=6u32 {
        for r in [0.1, 0.5] {
            let x0 = Complex64::from_polar(r, 0.3);
            let turns = BigRational::new(BigInt::from(1), BigInt::from(l + 1));
            let v = timeform_arc_integral(&Rho::Monomial(l + 2), x0, &turns).unwrap();
            assert!(v.norm() < 1e-10, "l = {}, |x0| = {}: {}", l, r, v);
        }
    }
}

#[test]
fn residue_and_pole() {
    let one = BigRational::from_integer(BigInt::from(1));
    let v = timeform_arc_integral(&Rho::Monomial(1), Complex64::new(0.5, 0.0), &one).unwrap();
    assert!((v - Complex64::new(0.0, TAU)).norm() < 1e-10);
    // rho = x - 1/2 vanishes on the circle of radius 1/2
    let rho = USeries::from_coeffs(vec![Scalar::from_ratio(-1, 2), Scalar::one()], 4);
    assert_eq!(timeform_arc_integral(&Rho::Series(rho), Complex64::new(0.5, 0.0), &one), Err(Error::PoleOnPath));
}
