use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// Endpoint of the leaf lifted once around the invariant axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZflowReport {
    /// `|(y(1), z(1)) - (y0, z0)|`.
    pub gap: f64,
    pub end: [Complex64; 2],
    pub steps: usize,
}

const RTOL: f64 = 1e-12;
const ATOL: f64 = 1e-14;
const MAX_STEPS: usize = 1_000_000;

type State = [Complex64; 2];

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += k[0] * (h * c);
        out[1] += k[1] * (h * c);
    }
    out
}

/// One Dormand-Prince 5(4) step: fifth-order solution and error estimate.
fn dopri_step(f: &impl Fn(f64, &State) -> State, t: f64, y: &State, h: f64) -> (State, f64) {
    let k1 = f(t, y);
    let k2 = f(t + h / 5.0, &axpy(y, h, &[(1.0 / 5.0, &k1)]));
    let k3 = f(t + 3.0 * h / 10.0, &axpy(y, h, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]));
    let k4 = f(t + 4.0 * h / 5.0, &axpy(y, h, &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)]));
    let k5 = f(
        t + 8.0 * h / 9.0,
        &axpy(y, h, &[(19372.0 / 6561.0, &k1), (-25360.0 / 2187.0, &k2), (64448.0 / 6561.0, &k3), (-212.0 / 729.0, &k4)]),
    );
    let k6 = f(
        t + h,
        &axpy(
            y,
            h,
            &[(9017.0 / 3168.0, &k1), (-355.0 / 33.0, &k2), (46732.0 / 5247.0, &k3), (49.0 / 176.0, &k4), (-5103.0 / 18656.0, &k5)],
        ),
    );
    let y5 = axpy(
        y,
        h,
        &[(35.0 / 384.0, &k1), (500.0 / 1113.0, &k3), (125.0 / 192.0, &k4), (-2187.0 / 6784.0, &k5), (11.0 / 84.0, &k6)],
    );
    let k7 = f(t + h, &y5);
    let e = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let ks = [k1, k2, k3, k4, k5, k6, k7];
    let mut err: f64 = 0.0;
    for i in 0..2 {
        let mut d = Complex64::new(0.0, 0.0);
        for (c, k) in e.iter().zip(&ks) {
            d += k[i] * (h * c);
        }
        let scale = ATOL + RTOL * y[i].norm().max(y5[i].norm());
        err = err.max(d.norm() / scale);
    }
    (y5, err)
}

fn integrate(f: impl Fn(f64, &State) -> State, y0: State) -> Result<(State, usize)> {
    let (mut t, mut y, mut h): (f64, State, f64) = (0.0, y0, 1e-3);
    let mut steps = 0;
    while t < 1.0 {
        if steps >= MAX_STEPS {
            return Err(Error::IntegrationFailure(format!("step budget exhausted at t = {}", t)));
        }
        h = h.min(1.0 - t);
        let (next, err) = dopri_step(&f, t, &y, h);
        if !err.is_finite() {
            return Err(Error::IntegrationFailure(format!("non-finite state at t = {}", t)));
        }
        if err <= 1.0 {
            t += h;
            y = next;
            steps += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 {
            return Err(Error::IntegrationFailure(format!("step size underflow at t = {}", t)));
        }
    }
    Ok((y, steps))
}

/// Integrates `dy/dx = z/x - a y/x`, `dz/dx = y/x^2 - b z/x` once around
/// `x = x0 e^{2 pi i t}` and reports the return gap.
pub fn zflow_uniformity_check(alpha: &BigRational, beta: &BigRational, x0: Complex64, y0z0: [Complex64; 2]) -> Result<ZflowReport> {
    if x0.norm() == 0.0 {
        return Err(Error::IntegrationFailure("base point on the singular fiber".into()));
    }
    let a = alpha.to_f64().unwrap_or(f64::NAN);
    let b = beta.to_f64().unwrap_or(f64::NAN);
    let i_tau = Complex64::new(0.0, TAU);
    let rhs = move |t: f64, s: &State| -> State {
        let x = x0 * Complex64::from_polar(1.0, TAU * t);
        // dx/dt = 2 pi i x
        [i_tau * (s[1] - a * s[0]), i_tau * (s[0] / x - b * s[1])]
    };
    let (end, steps) = integrate(rhs, y0z0)?;
    let gap = ((end[0] - y0z0[0]).norm_sqr() + (end[1] - y0z0[1]).norm_sqr()).sqrt();
    Ok(ZflowReport { gap, end, steps })
}
