//! Vector fields on `(C^3, 0)`: linear parts, orders, classification,
//! divisor factoring and polynomial conjugation.

use std::fmt;

use crate::algebra::{MSeries, Scalar, Valuation, Var};
use crate::error::{Error, Result};

/// `F d/dx + G d/dy + H d/dz`, all components sharing one truncation.
#[derive(Clone, PartialEq, Eq)]
pub struct VectorField {
    comps: [MSeries; 3],
}

/// A polynomial (or truncated) map `(x, y, z) = H(x', y', z')`.
pub type PolyMap = [MSeries; 3];

impl VectorField {
    /// Components are truncated to their common minimum.
    pub fn new(fx: MSeries, fy: MSeries, fz: MSeries) -> Self {
        let t = fx.trunc().min(fy.trunc()).min(fz.trunc());
        VectorField { comps: [fx.truncated(t), fy.truncated(t), fz.truncated(t)] }
    }

    pub fn from_comps(c: [MSeries; 3]) -> Self {
        let [a, b, d] = c;
        VectorField::new(a, b, d)
    }

    pub fn zero(trunc: u32) -> Self {
        VectorField::new(MSeries::zero(trunc), MSeries::zero(trunc), MSeries::zero(trunc))
    }

    pub fn comp(&self, v: Var) -> &MSeries {
        &self.comps[v.index()]
    }

    pub fn comps(&self) -> &[MSeries; 3] {
        &self.comps
    }

    pub fn trunc(&self) -> u32 {
        self.comps[0].trunc()
    }

    pub fn truncated(&self, t: u32) -> Self {
        VectorField::from_comps(self.comps.clone().map(|c| c.truncated(t)))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(MSeries::is_zero)
    }

    /// Multiplies every component by the scalar series `s`.
    pub fn mul_series(&self, s: &MSeries) -> Self {
        VectorField::from_comps(self.comps.clone().map(|c| c.mul(s)))
    }

    pub fn add(&self, o: &VectorField) -> Self {
        VectorField::new(self.comps[0].add(&o.comps[0]), self.comps[1].add(&o.comps[1]), self.comps[2].add(&o.comps[2]))
    }

    /// Renames coordinates: variable `i` becomes variable `perm[i]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let mut out = self.comps.clone();
        for i in 0..3 {
            out[perm[i]] = self.comps[i].permuted(perm);
        }
        VectorField::from_comps(out)
    }

    pub fn linear_part(&self) -> LinearPart {
        let mut m: [[Scalar; 3]; 3] = Default::default();
        for (r, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                let mut e = [0; 3];
                e[c] = 1;
                *entry = self.comps[r].coeff(&e);
            }
        }
        LinearPart { m }
    }

    pub fn is_singular(&self) -> bool {
        self.comps.iter().all(|c| c.constant_term().is_zero())
    }

    /// Agreement through degree `t`.
    pub fn eq_through(&self, o: &VectorField, t: u32) -> bool {
        (0..3).all(|i| self.comps[i].eq_through(&o.comps[i], t))
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.comps[0], self.comps[1], self.comps[2])
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [trunc {}]", self, self.trunc())
    }
}

/// `DX(0)`: entry `(r, c)` is the coefficient of variable `c` in component `r`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearPart {
    pub m: [[Scalar; 3]; 3],
}

impl LinearPart {
    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(Scalar::is_zero)
    }

    /// `(trace, sum of principal 2x2 minors, determinant)`.
    pub fn invariants(&self) -> [Scalar; 3] {
        let m = &self.m;
        let minor = |a: usize, b: usize| &m[a][a] * &m[b][b] - &m[a][b] * &m[b][a];
        let trace = &(&m[0][0] + &m[1][1]) + &m[2][2];
        let e2 = &(&minor(0, 1) + &minor(0, 2)) + &minor(1, 2);
        [trace, e2, det3(m)]
    }
}

fn det3(m: &[[Scalar; 3]; 3]) -> Scalar {
    let t0 = &m[0][0] * &(&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]);
    let t1 = &m[0][1] * &(&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0]);
    let t2 = &m[0][2] * &(&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0]);
    &(&t0 - &t1) + &t2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularityTag {
    Regular,
    Elementary,
    NilpotentNonzero,
    ZeroLinearPart,
}

impl SingularityTag {
    pub fn name(self) -> &'static str {
        match self {
            SingularityTag::Regular => "regular",
            SingularityTag::Elementary => "elementary",
            SingularityTag::NilpotentNonzero => "nilpotent_nonzero",
            SingularityTag::ZeroLinearPart => "zero_linear_part",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityClass {
    pub tag: SingularityTag,
    pub char_poly_invariants: [Scalar; 3],
}

/// Exact classification of the origin through the characteristic polynomial
/// of the linear part.
pub fn classify(x: &VectorField) -> SingularityClass {
    let lp = x.linear_part();
    let inv = lp.invariants();
    let tag = if !x.is_singular() {
        SingularityTag::Regular
    } else if inv.iter().any(|c| !c.is_zero()) {
        SingularityTag::Elementary
    } else if !lp.is_zero() {
        SingularityTag::NilpotentNonzero
    } else {
        SingularityTag::ZeroLinearPart
    };
    SingularityClass { tag, char_poly_invariants: inv }
}

/// Degree of the first nonzero homogeneous component.
pub fn order_at_origin(x: &VectorField) -> Result<u32> {
    x.comps.iter().map(MSeries::valuation).min().and_then(Valuation::finite).ok_or(Error::AllZero)
}

/// Swap taking `axis` to the `z` slot (an involution).
pub fn axis_to_z(axis: Var) -> [usize; 3] {
    match axis {
        Var::X => [2, 1, 0],
        Var::Y => [0, 2, 1],
        Var::Z => [0, 1, 2],
    }
}

/// Order of `x` along the coordinate line `axis`: `min(k, l + 1)` with `k` the
/// least transverse degree of the two transverse components and `l` that of
/// the tangent component.
pub fn order_wrt_curve(x: &VectorField, axis: Var) -> Result<u32> {
    let y = x.permuted(axis_to_z(axis));
    let transverse = |s: &MSeries| s.terms().map(|(e, _)| e[0] + e[1]).min();
    let k = [transverse(y.comp(Var::X)), transverse(y.comp(Var::Y))].into_iter().flatten().min();
    let l = transverse(y.comp(Var::Z)).map(|l| l + 1);
    [k, l].into_iter().flatten().min().ok_or(Error::AllZero)
}

/// Largest `e` with `v^e` dividing every component, and the quotient.
pub fn factor_divisor(x: &VectorField, v: Var) -> (u32, VectorField) {
    let e = x.comps.iter().filter_map(|c| c.var_valuation(v)).min().unwrap_or(0).min(x.trunc());
    if e == 0 {
        return (0, x.clone());
    }
    let mut mono = [0; 3];
    mono[v.index()] = e;
    let y = x.comps.clone().map(|c| c.divide_by_monomial(&mono).expect("power of v divides every term"));
    (e, VectorField::from_comps(y))
}

/// The identity map at truncation `t`.
pub fn identity_map(t: u32) -> PolyMap {
    Var::ALL.map(|v| MSeries::var(v, t))
}

/// The linear map `x_r = sum_c m[r][c] x'_c`.
pub fn linear_map(m: &[[Scalar; 3]; 3], t: u32) -> PolyMap {
    let row = |r: usize| {
        MSeries::from_terms(
            (0..3).map(|c| {
                let mut e = [0; 3];
                e[c] = 1;
                (e, m[r][c].clone())
            }),
            t,
        )
    };
    [row(0), row(1), row(2)]
}

/// Pull-back `(DH)^{-1} (X o H)` of `x` under the coordinate change
/// `old = H(new)`.
pub fn conjugate(x: &VectorField, h: &PolyMap) -> Result<VectorField> {
    let xh: Vec<MSeries> = x.comps.iter().map(|c| c.substitute(h)).collect::<Result<_>>()?;
    let mut dh: [[MSeries; 3]; 3] = Default::default();
    for r in 0..3 {
        for c in 0..3 {
            dh[r][c] = h[r].partial(Var::from_index(c))?;
        }
    }
    let cof = |r: usize, c: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
        dh[r1][c1].mul(&dh[r2][c2]).sub(&dh[r1][c2].mul(&dh[r2][c1]))
    };
    let det = (0..3).fold(MSeries::zero(dh[0][0].trunc()), |acc, c| acc.add(&dh[0][c].mul(&cof(0, c))));
    let det_inv = det.inverse_unit().map_err(|_| Error::NonInvertibleLinearPart)?;
    let comps: Vec<MSeries> = (0..3)
        .map(|i| {
            // (DH)^{-1}[i][j] = cof(j, i) / det
            let s = (0..3).fold(MSeries::zero(det.trunc()), |acc, j| acc.add(&cof(j, i).mul(&xh[j])));
            s.mul(&det_inv)
        })
        .collect();
    let [a, b, c]: [MSeries; 3] = comps.try_into().expect("three components");
    Ok(VectorField::new(a, b, c))
}
