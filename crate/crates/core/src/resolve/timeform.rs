use astro_float::{BigFloat, Consts, Radix, RoundingMode, Word};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::algebra::{Scalar, USeries};
use crate::error::{Error, Result};

/// Denominator of the time-form `dx / rho(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rho {
    /// `x^m`
    Monomial(u32),
    Series(USeries),
}

const PREC: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;
const NODES: usize = 16;
const TOL_PER_UNIT: f64 = 1e-13;
const MAX_DEPTH: u32 = 40;
const POLE_RATIO: f64 = 1e-10;

fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.as_raw_parts() {
        Some((m, _, sign, e, _)) => {
            let top = *m.last().expect("normalized mantissa") as f64 / 2f64.powi(Word::BITS as i32);
            let v = top * 2f64.powi(e);
            if sign.is_negative() {
                -v
            } else {
                v
            }
        }
        None => f64::NAN,
    }
}

#[derive(Clone)]
struct C {
    re: BigFloat,
    im: BigFloat,
}

struct Ctx {
    cc: Consts,
}

impl Ctx {
    fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, PREC)
    }

    fn ratio(&mut self, q: &BigRational) -> BigFloat {
        let n = BigFloat::parse(&q.numer().to_string(), Radix::Dec, PREC, RM, &mut self.cc);
        let d = BigFloat::parse(&q.denom().to_string(), Radix::Dec, PREC, RM, &mut self.cc);
        n.div(&d, PREC, RM)
    }

    fn scalar(&mut self, s: &Scalar) -> C {
        C { re: self.ratio(&s.re), im: self.ratio(&s.im) }
    }

    fn c(&self, z: Complex64) -> C {
        C { re: self.num(z.re), im: self.num(z.im) }
    }

    fn add(&self, a: &C, b: &C) -> C {
        C { re: a.re.add(&b.re, PREC, RM), im: a.im.add(&b.im, PREC, RM) }
    }

    fn sub(&self, a: &C, b: &C) -> C {
        C { re: a.re.sub(&b.re, PREC, RM), im: a.im.sub(&b.im, PREC, RM) }
    }

    fn mul(&self, a: &C, b: &C) -> C {
        let re = a.re.mul(&b.re, PREC, RM).sub(&a.im.mul(&b.im, PREC, RM), PREC, RM);
        let im = a.re.mul(&b.im, PREC, RM).add(&a.im.mul(&b.re, PREC, RM), PREC, RM);
        C { re, im }
    }

    fn scale(&self, a: &C, k: &BigFloat) -> C {
        C { re: a.re.mul(k, PREC, RM), im: a.im.mul(k, PREC, RM) }
    }

    fn norm_sqr(&self, a: &C) -> BigFloat {
        a.re.mul(&a.re, PREC, RM).add(&a.im.mul(&a.im, PREC, RM), PREC, RM)
    }

    fn div(&self, a: &C, b: &C) -> Option<C> {
        let n = self.norm_sqr(b);
        if n.is_zero() {
            return None;
        }
        let conj = C { re: b.re.clone(), im: b.im.neg() };
        let p = self.mul(a, &conj);
        Some(C { re: p.re.div(&n, PREC, RM), im: p.im.div(&n, PREC, RM) })
    }

    fn powi(&self, a: &C, m: u32) -> C {
        let mut acc = C { re: self.num(1.0), im: self.num(0.0) };
        for _ in 0..m {
            acc = self.mul(&acc, a);
        }
        acc
    }

    fn to_complex(&self, a: &C) -> Complex64 {
        Complex64::new(to_f64(&a.re), to_f64(&a.im))
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre(ctx: &Ctx) -> Vec<(BigFloat, BigFloat)> {
    let one = ctx.num(1.0);
    let two = ctx.num(2.0);
    let mut out = Vec::with_capacity(NODES);
    for i in 0..NODES {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (NODES as f64 + 0.5)).cos();
        let mut x = ctx.num(guess);
        let mut dp = ctx.num(0.0);
        for _ in 0..100 {
            let (mut p0, mut p1) = (one.clone(), x.clone());
            for k in 2..=NODES {
                let kf = ctx.num(k as f64);
                let a = ctx.num((2 * k - 1) as f64).mul(&x, PREC, RM).mul(&p1, PREC, RM);
                let b = ctx.num((k - 1) as f64).mul(&p0, PREC, RM);
                let p2 = a.sub(&b, PREC, RM).div(&kf, PREC, RM);
                p0 = p1;
                p1 = p2;
            }
            // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
            let x2m1 = x.mul(&x, PREC, RM).sub(&one, PREC, RM);
            dp = ctx.num(NODES as f64).mul(&x.mul(&p1, PREC, RM).sub(&p0, PREC, RM), PREC, RM).div(&x2m1, PREC, RM);
            let step = p1.div(&dp, PREC, RM);
            x = x.sub(&step, PREC, RM);
            if to_f64(&step).abs() < 1e-55 {
                break;
            }
        }
        let x2 = x.mul(&x, PREC, RM);
        let w = two.div(&one.sub(&x2, PREC, RM).mul(&dp.mul(&dp, PREC, RM), PREC, RM), PREC, RM);
        out.push((x, w));
    }
    out
}

struct Integrand<'a> {
    rho: &'a Rho,
    coeffs: Vec<C>,
    x0: C,
    omega: BigFloat,
    i_omega: C,
    min_rho: f64,
    max_rho: f64,
}

impl Integrand<'_> {
    fn eval(&mut self, ctx: &mut Ctx, t: &BigFloat) -> Result<C> {
        let phi = self.omega.mul(t, PREC, RM);
        let cos = phi.cos(PREC, RM, &mut ctx.cc);
        let sin = phi.sin(PREC, RM, &mut ctx.cc);
        let c = ctx.mul(&self.x0, &C { re: cos, im: sin });
        let rho = match self.rho {
            Rho::Monomial(m) => ctx.powi(&c, *m),
            Rho::Series(_) => {
                let mut acc = C { re: ctx.num(0.0), im: ctx.num(0.0) };
                for k in self.coeffs.iter().rev() {
                    acc = ctx.add(&ctx.mul(&acc, &c), k);
                }
                acc
            }
        };
        let r = ctx.to_complex(&rho).norm();
        self.min_rho = self.min_rho.min(r);
        self.max_rho = self.max_rho.max(r);
        let dc = ctx.mul(&self.i_omega, &c);
        ctx.div(&dc, &rho).ok_or(Error::PoleOnPath)
    }
}

fn panel(ctx: &mut Ctx, f: &mut Integrand, gl: &[(BigFloat, BigFloat)], a: &BigFloat, b: &BigFloat) -> Result<C> {
    let half = b.sub(a, PREC, RM).div(&ctx.num(2.0), PREC, RM);
    let mid = a.add(&half, PREC, RM);
    let mut acc = C { re: ctx.num(0.0), im: ctx.num(0.0) };
    for (x, w) in gl {
        let t = mid.add(&half.mul(x, PREC, RM), PREC, RM);
        let v = f.eval(ctx, &t)?;
        acc = ctx.add(&acc, &ctx.scale(&v, w));
    }
    Ok(ctx.scale(&acc, &half))
}

fn adaptive(
    ctx: &mut Ctx,
    f: &mut Integrand,
    gl: &[(BigFloat, BigFloat)],
    a: &BigFloat,
    b: &BigFloat,
    whole: C,
    depth: u32,
) -> Result<C> {
    let m = a.add(b, PREC, RM).div(&ctx.num(2.0), PREC, RM);
    let left = panel(ctx, f, gl, a, &m)?;
    let right = panel(ctx, f, gl, &m, b)?;
    let both = ctx.add(&left, &right);
    let err = ctx.to_complex(&ctx.sub(&both, &whole)).norm();
    let width = to_f64(&b.sub(a, PREC, RM));
    if err <= TOL_PER_UNIT * width {
        return Ok(both);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::IntegrationFailure(format!("quadrature did not converge, panel error {:e}", err)));
    }
    let l = adaptive(ctx, f, gl, a, &m, left, depth + 1)?;
    let r = adaptive(ctx, f, gl, &m, b, right, depth + 1)?;
    Ok(ctx.add(&l, &r))
}

/// `int_c dx / rho(x)` over the arc `c(t) = x0 e^{2 pi i turns t}`, `t in [0, 1]`,
/// by adaptive Gauss-Legendre quadrature in 192-bit arithmetic.
pub fn timeform_arc_integral(rho: &Rho, x0: Complex64, turns: &BigRational) -> Result<Complex64> {
    if x0.norm() == 0.0 {
        return Err(Error::PoleOnPath);
    }
    let mut ctx = Ctx { cc: Consts::new().map_err(|e| Error::IntegrationFailure(format!("{:?}", e)))? };
    let pi = ctx.cc.pi(PREC, RM);
    let theta = ctx.ratio(turns);
    let omega = pi.mul(&ctx.num(2.0), PREC, RM).mul(&theta, PREC, RM);
    let coeffs = match rho {
        Rho::Monomial(_) => Vec::new(),
        Rho::Series(s) => s.coeffs().iter().map(|k| ctx.scalar(k)).collect(),
    };
    let i_omega = C { re: ctx.num(0.0), im: omega.clone() };
    let mut f = Integrand { rho, coeffs, x0: ctx.c(x0), omega, i_omega, min_rho: f64::INFINITY, max_rho: 0.0 };
    let gl = gauss_legendre(&ctx);
    let pieces = (8.0 * turns.abs().to_f64().unwrap_or(1.0)).ceil().max(2.0) as usize;
    let step = ctx.num(1.0).div(&ctx.num(pieces as f64), PREC, RM);
    let mut run = || -> Result<C> {
        let mut total = C { re: ctx.num(0.0), im: ctx.num(0.0) };
        for k in 0..pieces {
            let a = step.mul(&ctx.num(k as f64), PREC, RM);
            let b = step.mul(&ctx.num((k + 1) as f64), PREC, RM);
            let whole = panel(&mut ctx, &mut f, &gl, &a, &b)?;
            let v = adaptive(&mut ctx, &mut f, &gl, &a, &b, whole, 0)?;
            total = ctx.add(&total, &v);
        }
        Ok(total)
    };
    let total = run();
    if f.min_rho <= POLE_RATIO * f.max_rho {
        return Err(Error::PoleOnPath);
    }
    Ok(ctx.to_complex(&total?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use std::f64::consts::TAU;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn residue_of_dx_over_x() {
        let v = timeform_arc_integral(&Rho::Monomial(1), Complex64::new(0.3, 0.1), &q(1, 1)).unwrap();
        assert!((v - Complex64::new(0.0, TAU)).norm() < 1e-10);
    }

    #[test]
    fn exact_forms_close_up() {
        let v = timeform_arc_integral(&Rho::Monomial(2), Complex64::new(0.5, 0.0), &q(1, 1)).unwrap();
        assert!(v.norm() < 1e-10);
        let v = timeform_arc_integral(&Rho::Monomial(5), Complex64::new(0.1, 0.0), &q(1, 4)).unwrap();
        assert!(v.norm() < 1e-10, "{}", v);
    }

    #[test]
    fn partial_arc_of_dx_over_x() {
        let v = timeform_arc_integral(&Rho::Monomial(1), Complex64::new(2.0, 0.0), &q(1, 4)).unwrap();
        assert!((v - Complex64::new(0.0, TAU / 4.0)).norm() < 1e-10);
    }

    #[test]
    fn series_denominator_and_pole() {
        // rho = x + x^2 on |x| = 1/2: residue at 0 is 1, the pole at -1 lies outside.
        let s = USeries::from_coeffs(vec![Scalar::zero(), Scalar::one(), Scalar::one()], 2);
        let v = timeform_arc_integral(&Rho::Series(s.clone()), Complex64::new(0.5, 0.0), &q(1, 1)).unwrap();
        assert!((v - Complex64::new(0.0, TAU)).norm() < 1e-10);
        assert_eq!(timeform_arc_integral(&Rho::Series(s), Complex64::new(1.0, 0.0), &q(1, 2)), Err(Error::PoleOnPath));
        assert_eq!(timeform_arc_integral(&Rho::Monomial(3), Complex64::new(0.0, 0.0), &q(1, 1)), Err(Error::PoleOnPath));
    }
}
