//! Formal curves, invariance residuals, multiplicity along a curve, the
//! graph separatrix solver, strict transforms and straightening.

use std::fmt;

use crate::algebra::{MSeries, Scalar, USeries, Valuation, Var};
use crate::blowup::{ChartKind, ChartMap};
use crate::error::{Error, Result};
use crate::vfield::{axis_to_z, conjugate, VectorField};

/// `T -> (phi1(T), phi2(T), phi3(T))`.
#[derive(Clone, PartialEq, Eq)]
pub struct FormalCurve {
    phi: [USeries; 3],
    graph_over_z: bool,
}

impl FormalCurve {
    /// Components are cut to their common truncation.
    pub fn new(phi: [USeries; 3]) -> Result<Self> {
        let t = phi.iter().map(USeries::trunc).min().expect("three components");
        let phi = phi.map(|p| p.truncated(t));
        if phi.iter().all(USeries::is_zero) {
            return Err(Error::AllZero);
        }
        let graph_over_z = t >= 1 && phi[2] == USeries::t(t);
        Ok(FormalCurve { phi, graph_over_z })
    }

    /// The graph `(f(T), g(T), T)`.
    pub fn graph(f: USeries, g: USeries) -> Self {
        let t = f.trunc().min(g.trunc()).max(1);
        FormalCurve::new([f, g, USeries::t(t)]).expect("T is nonzero")
    }

    /// The coordinate axis of `v`, parameterized by that coordinate.
    pub fn axis(v: Var, trunc: u32) -> Self {
        let mut phi = [USeries::zero(trunc), USeries::zero(trunc), USeries::zero(trunc)];
        phi[v.index()] = USeries::t(trunc);
        FormalCurve::new(phi).expect("T is nonzero")
    }

    pub fn phi(&self) -> &[USeries; 3] {
        &self.phi
    }

    pub fn component(&self, v: Var) -> &USeries {
        &self.phi[v.index()]
    }

    pub fn trunc(&self) -> u32 {
        self.phi[0].trunc()
    }

    pub fn is_graph_over_z(&self) -> bool {
        self.graph_over_z
    }

    pub fn passes_through_origin(&self) -> bool {
        self.phi.iter().all(|p| p.coeff(0).is_zero())
    }

    /// Contact with the `z`-axis: `min(ord phi1, ord phi2)`.
    pub fn tangency(&self) -> Valuation {
        self.phi[0].valuation().min(self.phi[1].valuation())
    }

    pub fn truncated(&self, t: u32) -> Self {
        FormalCurve::new(self.phi.clone().map(|p| p.truncated(t))).expect("truncation keeps a nonzero component")
    }

    /// Renames coordinates: component `i` moves to slot `perm[i]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let mut out = self.phi.clone();
        for i in 0..3 {
            out[perm[i]] = self.phi[i].clone();
        }
        FormalCurve::new(out).expect("permutation keeps a nonzero component")
    }

    /// The same curve reparameterized so that the `v` component is `T`.
    /// Requires that component to have valuation one.
    pub fn as_graph_over(&self, v: Var) -> Result<Self> {
        let s = &self.phi[v.index()];
        if s.valuation() != Valuation::Finite(1) {
            return Err(Error::NotGraph);
        }
        let r = s.reversion()?;
        let phi: Vec<USeries> = self.phi.iter().map(|p| p.compose(&r)).collect::<Result<_>>()?;
        let mut phi: [USeries; 3] = phi.try_into().expect("three components");
        phi[v.index()] = USeries::t(r.trunc());
        FormalCurve::new(phi)
    }
}

impl fmt::Display for FormalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {}; {})", self.phi[0], self.phi[1], self.phi[2])
    }
}

impl fmt::Debug for FormalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [trunc {}]", self, self.trunc())
    }
}

/// Vanishing data of the invariance residuals: `first_nonzero` is the
/// lowest degree at which some residual is nonzero, `Infinite` if all trusted
/// coefficients vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Residual {
    pub first_nonzero: Valuation,
    pub trunc: u32,
}

impl Residual {
    pub fn is_invariant(&self) -> bool {
        self.first_nonzero.is_infinite()
    }

    /// Largest `d` such that the residuals vanish through degree `d`.
    pub fn vanishes_through(&self) -> Option<u32> {
        match self.first_nonzero {
            Valuation::Infinite => Some(self.trunc),
            Valuation::Finite(0) => None,
            Valuation::Finite(k) => Some(k - 1),
        }
    }
}

fn compose_field(x: &VectorField, phi: &FormalCurve) -> Result<[USeries; 3]> {
    if !phi.passes_through_origin() {
        return Err(Error::CurveMissesCenter);
    }
    let c: Vec<USeries> = x.comps().iter().map(|s| s.compose_curve(phi.phi())).collect::<Result<_>>()?;
    Ok(c.try_into().expect("three components"))
}

fn derivatives(phi: &FormalCurve) -> Result<[USeries; 3]> {
    let d: Vec<USeries> = phi.phi().iter().map(USeries::derivative).collect::<Result<_>>()?;
    Ok(d.try_into().expect("three components"))
}

/// The three `2x2` minors of `(phi', X o phi)`, all of which vanish exactly
/// when `X` is tangent to the curve.
pub fn invariance_residual(x: &VectorField, phi: &FormalCurve) -> Result<Residual> {
    let xp = compose_field(x, phi)?;
    let dp = derivatives(phi)?;
    let mut first = Valuation::Infinite;
    let mut trunc = u32::MAX;
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let m = dp[i].mul(&xp[j]).sub(&dp[j].mul(&xp[i]));
        first = first.min(m.valuation());
        trunc = trunc.min(m.trunc());
    }
    Ok(Residual { first_nonzero: first, trunc })
}

/// Order of `g` in `X o phi = g phi'`.
pub fn multiplicity(x: &VectorField, phi: &FormalCurve) -> Result<u32> {
    let r = invariance_residual(x, phi)?;
    if let Valuation::Finite(order) = r.first_nonzero {
        return Err(Error::NotASeparatrix { order, trunc: r.trunc });
    }
    let xp = compose_field(x, phi)?;
    if xp.iter().all(USeries::is_zero) {
        return Err(Error::ZeroAlongCurve);
    }
    let dp = derivatives(phi)?;
    let mut comps: Vec<(usize, u32)> =
        (0..3).filter_map(|i| dp[i].valuation().finite().map(|v| (i, v))).collect();
    comps.sort_by_key(|&(i, v)| (v, i));
    let &(j, p) = comps.first().ok_or_else(|| Error::PrecisionExhausted("curve derivative vanishes".into()))?;
    let q = xp[j].valuation().finite().ok_or_else(|| {
        Error::PrecisionExhausted(format!("component {} of X along the curve vanishes at trunc {}", j, xp[j].trunc()))
    })?;
    if q < p {
        return Err(Error::NotASeparatrix { order: q, trunc: r.trunc });
    }
    let m = q - p;
    for &(i, pi) in comps.iter().skip(1) {
        if let Some(qi) = xp[i].valuation().finite() {
            if qi < pi || qi - pi != m {
                return Err(Error::Inconsistent(format!(
                    "multiplicity {} from component {} but {} from component {}",
                    m,
                    j,
                    qi as i64 - pi as i64,
                    i
                )));
            }
            break;
        }
    }
    Ok(m)
}

struct Shifts {
    tau: [u32; 2],
    base: [[Scalar; 2]; 2],
    hc_next: [Scalar; 2],
}

/// Graph separatrix `(x(z), y(z), z)` solved degree by degree through
/// degree `n` from `H(phi) x' = F(phi)` and `H(phi) y' = G(phi)`.
pub fn solve_graph_separatrix(x: &VectorField, n: u32) -> Result<FormalCurve> {
    let t = x.trunc();
    let hz = x.comp(Var::Z).restrict_to_axis(Var::Z);
    match hz.valuation() {
        Valuation::Finite(h) if h >= 1 => {}
        Valuation::Finite(_) => return Err(Error::RegularPoint),
        Valuation::Infinite => {
            return Err(Error::NotGraphParameterizable("d/dz component vanishes along the z-axis".into()))
        }
    }
    let partials: [[MSeries; 3]; 2] = [
        [x.comp(Var::X).partial(Var::X)?, x.comp(Var::Y).partial(Var::X)?, x.comp(Var::Z).partial(Var::X)?],
        [x.comp(Var::X).partial(Var::Y)?, x.comp(Var::Y).partial(Var::Y)?, x.comp(Var::Z).partial(Var::Y)?],
    ];
    let mut a = USeries::zero(t);
    let mut b = USeries::zero(t);
    let mut frozen: Option<Shifts> = None;
    let mut d = 1;
    let mut limit = n.min(t.saturating_sub(1));
    while d <= limit {
        let phi = FormalCurve::graph(a.clone(), b.clone());
        let shifts = match frozen.take() {
            Some(s) => s,
            None => shifts_at(x, &partials, &phi)?,
        };
        let tau_max = shifts.tau[0].max(shifts.tau[1]);
        limit = limit.min(t.saturating_sub(1 + tau_max));
        if d > limit {
            break;
        }
        let e = equations(x, &phi)?;
        for i in 0..2 {
            check_rows(&e[i], d - 1 + shifts.tau[i], d)?;
        }
        let m: [[Scalar; 2]; 2] = std::array::from_fn(|i| {
            std::array::from_fn(|u| {
                let mut s = shifts.base[i][u].clone();
                if i == u {
                    s += &shifts.hc_next[i].scale_int(d as i64);
                }
                s
            })
        });
        let rhs: [Scalar; 2] = std::array::from_fn(|i| -e[i].coeff(d + shifts.tau[i]).clone());
        let delta = solve_2x2(&m, &rhs).ok_or_else(|| Error::Obstructed {
            degree: d,
            witness: format!(
                "[[{}, {}], [{}, {}]] * (a_{d}, b_{d}) = ({}, {})",
                m[0][0], m[0][1], m[1][0], m[1][1], rhs[0], rhs[1]
            ),
        })?;
        a.set_coeff(d, delta[0].clone());
        b.set_coeff(d, delta[1].clone());
        if d > tau_max + 1 {
            frozen = Some(shifts);
        }
        d += 1;
    }
    let out_trunc = limit;
    if out_trunc == 0 {
        return Err(Error::PrecisionExhausted(format!("no trusted separatrix degree at trunc {}", t)));
    }
    let phi = FormalCurve::graph(a.truncated(out_trunc), b.truncated(out_trunc));
    let full = FormalCurve::graph(a, b);
    let e = equations(x, &full)?;
    let tau = shifts_at(x, &partials, &full)?.tau;
    for i in 0..2 {
        check_rows(&e[i], out_trunc + tau[i], out_trunc)?;
    }
    let r = invariance_residual(x, &phi)?;
    if let Valuation::Finite(order) = r.first_nonzero {
        return Err(Error::NotGraphParameterizable(format!("residual nonzero at degree {}", order)));
    }
    Ok(phi)
}

fn check_rows(e: &USeries, through: u32, degree: u32) -> Result<()> {
    let top = through.min(e.trunc());
    if let Some(k) = (0..=top).find(|&k| !e.coeff(k).is_zero()) {
        return Err(Error::NotGraphParameterizable(format!(
            "equation residual {} at degree {} after solving degree {}",
            e.coeff(k),
            k,
            degree.saturating_sub(1)
        )));
    }
    Ok(())
}

fn equations(x: &VectorField, phi: &FormalCurve) -> Result<[USeries; 2]> {
    let c = compose_field(x, phi)?;
    let a1 = phi.component(Var::X).derivative()?;
    let b1 = phi.component(Var::Y).derivative()?;
    Ok([c[2].mul(&a1).sub(&c[0]), c[2].mul(&b1).sub(&c[1])])
}

fn shifts_at(x: &VectorField, partials: &[[MSeries; 3]; 2], phi: &FormalCurve) -> Result<Shifts> {
    let c = compose_field(x, phi)?;
    let hc = &c[2];
    let a1 = phi.component(Var::X).derivative()?;
    let b1 = phi.component(Var::Y).derivative()?;
    let p: Vec<[USeries; 3]> = partials
        .iter()
        .map(|row| {
            let v: Vec<USeries> = row.iter().map(|s| s.compose_curve(phi.phi())).collect::<Result<_>>()?;
            Ok(v.try_into().expect("three components"))
        })
        .collect::<Result<_>>()?;
    // k[i][u]: derivative of equation i with respect to unknown u, minus the d-dependent term.
    let k = [
        [p[0][2].mul(&a1).sub(&p[0][0]), p[1][2].mul(&a1).sub(&p[1][0])],
        [p[0][2].mul(&b1).sub(&p[0][1]), p[1][2].mul(&b1).sub(&p[1][1])],
    ];
    let h = hc.valuation();
    let mut tau = [0u32; 2];
    for i in 0..2 {
        let own = h.minus(1).min(k[i][i].valuation());
        let other = k[i][1 - i].valuation();
        tau[i] = own.min(other).finite().ok_or_else(|| {
            Error::NotGraphParameterizable(format!("equation {} is independent of the curve at trusted precision", i + 1))
        })?;
    }
    let coeff = |s: &USeries, j: u32| if j <= s.trunc() { s.coeff(j).clone() } else { Scalar::zero() };
    let base = std::array::from_fn(|i| std::array::from_fn(|u| coeff(&k[i][u], tau[i])));
    let hc_next = std::array::from_fn(|i| coeff(hc, tau[i] + 1));
    Ok(Shifts { tau, base, hc_next })
}

/// Solves `m v = r`; a singular consistent system fixes the free unknown at 0.
fn solve_2x2(m: &[[Scalar; 2]; 2], r: &[Scalar; 2]) -> Option<[Scalar; 2]> {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if let Some(di) = det.inv() {
        let v0 = &(&r[0] * &m[1][1] - &m[0][1] * &r[1]) * &di;
        let v1 = &(&m[0][0] * &r[1] - &r[0] * &m[1][0]) * &di;
        return Some([v0, v1]);
    }
    let consistent = (&m[0][0] * &r[1] - &m[1][0] * &r[0]).is_zero() && (&m[0][1] * &r[1] - &m[1][1] * &r[0]).is_zero();
    if !consistent {
        return None;
    }
    for row in 0..2 {
        for col in 0..2 {
            if let Some(p) = m[row][col].inv() {
                let mut v = [Scalar::zero(), Scalar::zero()];
                v[col] = &r[row] * &p;
                return Some(v);
            }
        }
    }
    if r.iter().all(Scalar::is_zero) {
        Some([Scalar::zero(), Scalar::zero()])
    } else {
        None
    }
}

/// Graph separatrix tangent to the `axis` direction, via a coordinate swap.
pub fn solve_separatrix_along(x: &VectorField, axis: Var, n: u32) -> Result<FormalCurve> {
    let perm = axis_to_z(axis);
    Ok(solve_graph_separatrix(&x.permuted(perm), n)?.permuted(perm))
}

/// Strict transform of `phi` through `chart`. For `Weight2` the new parameter
/// `s` satisfies `T = s^2`.
pub fn transform_curve(phi: &FormalCurve, chart: &ChartMap) -> Result<FormalCurve> {
    if !phi.passes_through_origin() {
        return Err(Error::CurveMissesCenter);
    }
    if chart.kind == ChartKind::Weight2 {
        if !phi.is_graph_over_z() {
            return Err(Error::NotGraph);
        }
        let u = phi.component(Var::X).substitute_power(2);
        let v = phi.component(Var::Y).substitute_power(2).divide_by_t_power(1)?;
        let t = u.trunc();
        return FormalCurve::new([u, v, USeries::t(t)]);
    }
    let minv = chart.inverse_exponents();
    let mut out: Vec<USeries> = Vec::with_capacity(3);
    for row in &minv {
        let mut num = USeries::one(phi.trunc());
        let mut den = USeries::one(phi.trunc());
        for (i, e) in row.iter().enumerate() {
            let k = e.re.to_integer();
            let k: i64 = num_traits::ToPrimitive::to_i64(&k).expect("small exponent");
            for _ in 0..k.unsigned_abs() {
                if k > 0 {
                    num = num.mul(&phi.phi()[i]);
                } else {
                    den = den.mul(&phi.phi()[i]);
                }
            }
        }
        out.push(num.div(&den)?);
    }
    FormalCurve::new(out.try_into().expect("three components"))
}

/// Conjugates `x` by `(x + f_m(z), y + g_m(z), z)`, where `f_m, g_m` are the
/// graph series of `phi` cut at degree `m`, so that the curve becomes tangent
/// to the `z`-axis to order greater than `m`.
pub fn straighten(x: &VectorField, phi: &FormalCurve, m: u32) -> Result<(VectorField, FormalCurve)> {
    if !phi.is_graph_over_z() {
        return Err(Error::NotGraph);
    }
    if m > phi.trunc() {
        return Err(Error::PrecisionExhausted(format!("straightening to degree {} of a curve known to {}", m, phi.trunc())));
    }
    let t = x.trunc() + 1;
    let in_z = |s: &USeries| {
        MSeries::from_terms((1..=m).map(|k| ([0, 0, k], s.coeff(k).clone())), t)
    };
    let f = in_z(phi.component(Var::X));
    let g = in_z(phi.component(Var::Y));
    let h = [MSeries::var(Var::X, t).add(&f), MSeries::var(Var::Y, t).add(&g), MSeries::var(Var::Z, t)];
    let y = conjugate(x, &h)?;
    let cut = |s: &USeries| USeries::from_coeffs(s.coeffs()[..=m as usize].to_vec(), s.trunc());
    let curve = FormalCurve::graph(
        phi.component(Var::X).sub(&cut(phi.component(Var::X))),
        phi.component(Var::Y).sub(&cut(phi.component(Var::Y))),
    );
    Ok((y, curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::point_blowup;

    fn vars(t: u32) -> (MSeries, MSeries, MSeries) {
        (MSeries::var(Var::X, t), MSeries::var(Var::Y, t), MSeries::var(Var::Z, t))
    }

    fn x_lambda(lam: i64, t: u32) -> VectorField {
        let (x, y, z) = vars(t);
        VectorField::new(y.sub(&z.scale(&Scalar::from_int(lam))), z.mul(&x), z.pow(3))
    }

    fn useries(c: &[i64], t: u32) -> USeries {
        USeries::from_coeffs(c.iter().map(|&k| Scalar::from_int(k)).collect(), t)
    }

    #[test]
    fn x_axis_of_z_example_is_invariant() {
        let (x, y, z) = vars(10);
        let f = VectorField::new(x.pow(2), x.mul(&z), y.sub(&x.mul(&z)));
        let r = invariance_residual(&f, &FormalCurve::axis(Var::X, 10)).unwrap();
        assert!(r.is_invariant());
    }

    #[test]
    fn diagonal_is_not_invariant() {
        let (x, y, z) = vars(8);
        let f = VectorField::new(x, y, z.pow(2));
        let t = USeries::t(8);
        let r = invariance_residual(&f, &FormalCurve::new([t.clone(), t.clone(), t]).unwrap()).unwrap();
        assert_eq!(r.first_nonzero, Valuation::Finite(1));
        assert_eq!(r.vanishes_through(), Some(0));
    }

    #[test]
    fn x_lambda_recurrence() {
        let phi = solve_graph_separatrix(&x_lambda(1, 30), 30).unwrap();
        let b = phi.component(Var::Y);
        let a = phi.component(Var::X);
        assert_eq!(b.coeff(1), &Scalar::from_int(1));
        assert_eq!(b.coeff(4), &Scalar::from_int(2));
        assert_eq!(b.coeff(7), &Scalar::from_int(40));
        assert_eq!(b.coeff(10), &Scalar::from_int(2240));
        assert_eq!(a.coeff(2), &Scalar::from_int(1));
        assert_eq!(a.coeff(5), &Scalar::from_int(8));
        for k in 0..=b.trunc() {
            if k % 3 != 1 {
                assert!(b.coeff(k).is_zero(), "b_{}", k);
            }
        }
        assert_eq!(multiplicity(&x_lambda(1, 30), &phi), Ok(3));
    }

    #[test]
    fn lambda_zero_gives_axis() {
        let phi = solve_graph_separatrix(&x_lambda(0, 16), 12).unwrap();
        assert_eq!(phi.tangency(), Valuation::Infinite);
    }

    #[test]
    fn saddle_has_axis_separatrix() {
        let (x, y, z) = vars(10);
        let f = VectorField::new(x.clone(), y.neg(), z.pow(2));
        let phi = solve_graph_separatrix(&f, 6).unwrap();
        assert!(phi.component(Var::X).is_zero() && phi.component(Var::Y).is_zero());
        assert_eq!(phi.trunc(), 6);
    }

    #[test]
    fn normal_form_multiplicity_is_n() {
        let (x, y, z) = vars(12);
        let f = VectorField::new(y.clone(), z.mul(&x), z.pow(4));
        assert_eq!(multiplicity(&f, &FormalCurve::axis(Var::Z, 12)), Ok(4));
    }

    #[test]
    fn not_a_separatrix() {
        let (x, y, z) = vars(8);
        let f = VectorField::new(MSeries::zero(8).add(&z), x, y);
        assert!(matches!(multiplicity(&f, &FormalCurve::axis(Var::Z, 8)), Err(Error::NotASeparatrix { .. })));
    }

    #[test]
    fn transform_monomial_curve() {
        let phi = FormalCurve::new([useries(&[0, 0, 1], 8), useries(&[0, 0, 0, 1], 8), USeries::t(8)]).unwrap();
        let psi = transform_curve(&phi, &ChartMap::point(Var::Z)).unwrap();
        assert_eq!(psi, FormalCurve::new([useries(&[0, 1], 7), useries(&[0, 0, 1], 7), USeries::t(7)]).unwrap());
        let axis = transform_curve(&FormalCurve::axis(Var::Z, 6), &ChartMap::weight2()).unwrap();
        assert_eq!(axis.tangency(), Valuation::Infinite);
        assert_eq!(axis.component(Var::Z), &USeries::t(11));
    }

    #[test]
    fn contact_drops_by_one() {
        let phi = FormalCurve::graph(useries(&[0, 0, 0, 0, 3], 10), useries(&[0, 0, 0, 0, 0, 1], 10));
        let psi = transform_curve(&phi, &ChartMap::point(Var::Z)).unwrap();
        assert_eq!(psi.tangency(), Valuation::Finite(3));
    }

    #[test]
    fn multiplicity_survives_raw_pullback() {
        let t = 14;
        let phi = solve_graph_separatrix(&x_lambda(1, t), 12).unwrap();
        let (x, phi) = straighten(&x_lambda(1, t), &phi, 1).unwrap();
        let r = point_blowup(&x, &ChartMap::point(Var::Z)).unwrap();
        let psi = transform_curve(&phi, &ChartMap::point(Var::Z)).unwrap();
        assert_eq!(multiplicity(&r.raw, &psi), Ok(3));
    }

    #[test]
    fn straightening_raises_contact() {
        let t = 20;
        let x = x_lambda(1, t);
        let phi = solve_graph_separatrix(&x, 18).unwrap();
        let (y, psi) = straighten(&x, &phi, 8).unwrap();
        assert!(psi.tangency() > Valuation::Finite(8));
        assert!(invariance_residual(&y, &psi).unwrap().is_invariant());
        let again = solve_graph_separatrix(&y, 15).unwrap();
        assert!(again.tangency() > Valuation::Finite(8));
        let g = |v: &VectorField| v.comp(Var::Y).coeff(&[1, 0, 0]);
        assert_eq!(g(&y), g(&x));
        let (same, _) = straighten(&x, &FormalCurve::axis(Var::Z, 10), 5).unwrap();
        assert_eq!(same, x);
    }

    #[test]
    fn reparameterization_to_graph() {
        let phi = FormalCurve::new([useries(&[0, 0, 1], 8), useries(&[0], 8), useries(&[0, 2, 1], 8)]).unwrap();
        let g = phi.as_graph_over(Var::Z).unwrap();
        assert!(g.is_graph_over_z());
        assert_eq!(g.component(Var::X).coeff(2), &Scalar::from_ratio(1, 4));
    }
}
