use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::{Scalar, USeries, Valuation, Var};
use crate::error::{Error, Result};

/// Exponent triple `(i, j, k)` of `x^i y^j z^k`.
pub type Exp = [u32; 3];

fn degree(e: &Exp) -> u32 {
    e[0] + e[1] + e[2]
}

/// Sparse truncated series in three variables.
///
/// Invariant: every stored term has total degree `<= trunc` and a nonzero
/// coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct MSeries {
    terms: BTreeMap<Exp, Scalar>,
    trunc: u32,
}

impl Default for MSeries {
    fn default() -> Self {
        MSeries::zero(0)
    }
}

impl MSeries {
    pub fn zero(trunc: u32) -> Self {
        MSeries { terms: BTreeMap::new(), trunc }
    }

    pub fn constant(c: Scalar, trunc: u32) -> Self {
        MSeries::monomial([0, 0, 0], c, trunc)
    }

    pub fn one(trunc: u32) -> Self {
        MSeries::constant(Scalar::one(), trunc)
    }

    pub fn var(v: Var, trunc: u32) -> Self {
        let mut e = [0; 3];
        e[v.index()] = 1;
        MSeries::monomial(e, Scalar::one(), trunc)
    }

    pub fn monomial(e: Exp, c: Scalar, trunc: u32) -> Self {
        let mut s = MSeries::zero(trunc);
        s.add_term(e, &c);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (Exp, Scalar)>>(terms: I, trunc: u32) -> Self {
        let mut s = MSeries::zero(trunc);
        for (e, c) in terms {
            s.add_term(e, &c);
        }
        s
    }

    /// Adds `c * x^e`; terms beyond `trunc` are discarded.
    pub fn add_term(&mut self, e: Exp, c: &Scalar) {
        if degree(&e) > self.trunc || c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &Exp) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&[0, 0, 0])
    }

    /// Restriction to degree `<= min(t, trunc)`.
    pub fn truncated(&self, t: u32) -> Self {
        let t = t.min(self.trunc);
        MSeries {
            terms: self.terms.iter().filter(|(e, _)| degree(e) <= t).map(|(e, c)| (*e, c.clone())).collect(),
            trunc: t,
        }
    }

    pub fn add(&self, o: &MSeries) -> Self {
        let mut r = self.truncated(o.trunc);
        for (e, c) in &o.terms {
            r.add_term(*e, c);
        }
        r
    }

    pub fn sub(&self, o: &MSeries) -> Self {
        let mut r = self.truncated(o.trunc);
        for (e, c) in &o.terms {
            r.add_term(*e, &-c);
        }
        r
    }

    pub fn neg(&self) -> Self {
        MSeries { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(), trunc: self.trunc }
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        if k.is_zero() {
            return MSeries::zero(self.trunc);
        }
        MSeries { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(), trunc: self.trunc }
    }

    /// Product truncated to `min(self.trunc, o.trunc)`.
    pub fn mul(&self, o: &MSeries) -> Self {
        let t = self.trunc.min(o.trunc);
        let mut r = MSeries::zero(t);
        for (ea, ca) in &self.terms {
            let da = degree(ea);
            if da > t {
                continue;
            }
            for (eb, cb) in &o.terms {
                if da + degree(eb) > t {
                    continue;
                }
                r.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], &(ca * cb));
            }
        }
        r
    }

    /// Multiplies by the exact monomial `x^e`, keeping `trunc`.
    pub fn mul_monomial(&self, e: &Exp) -> Self {
        let mut r = MSeries::zero(self.trunc);
        for (f, c) in &self.terms {
            r.add_term([f[0] + e[0], f[1] + e[1], f[2] + e[2]], c);
        }
        r
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = MSeries::one(self.trunc);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Least total degree of a nonzero term.
    pub fn valuation(&self) -> Valuation {
        self.terms.keys().map(degree).min().map_or(Valuation::Infinite, Valuation::Finite)
    }

    /// Least exponent of `v` among the terms, `None` for the zero series.
    pub fn var_valuation(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|e| e[v.index()]).min()
    }

    pub fn partial(&self, v: Var) -> Result<Self> {
        let t = self.trunc.checked_sub(1).ok_or_else(|| Error::PrecisionExhausted("derivative of a trunc-0 series".into()))?;
        let i = v.index();
        let mut r = MSeries::zero(t);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                r.add_term(f, &c.scale_int(e[i] as i64));
            }
        }
        Ok(r)
    }

    pub fn divide_by_variable(&self, v: Var) -> Result<Self> {
        let mut e = [0; 3];
        e[v.index()] = 1;
        self.divide_by_monomial(&e).map_err(|err| match err {
            Error::NotDivisible { witness, .. } => Error::NotDivisible { var: v, witness },
            other => other,
        })
    }

    /// Exact division by `x^e`; `trunc` drops by the degree of `e`.
    pub fn divide_by_monomial(&self, e: &Exp) -> Result<Self> {
        let d = degree(e);
        let t = self
            .trunc
            .checked_sub(d)
            .ok_or_else(|| Error::PrecisionExhausted(format!("division by a degree-{} monomial at trunc {}", d, self.trunc)))?;
        let mut r = MSeries::zero(t);
        for (f, c) in &self.terms {
            if (0..3).any(|i| f[i] < e[i]) {
                let var = Var::ALL.into_iter().find(|v| f[v.index()] < e[v.index()]).unwrap_or(Var::X);
                return Err(Error::NotDivisible { var, witness: format_term(f, c) });
            }
            r.add_term([f[0] - e[0], f[1] - e[1], f[2] - e[2]], c);
        }
        Ok(r)
    }

    /// `self(subs[0], subs[1], subs[2])`. Every substituted series must have
    /// zero constant term; the result is trusted through
    /// `min(self.trunc, subs[i].trunc)`.
    pub fn substitute(&self, subs: &[MSeries; 3]) -> Result<Self> {
        for (index, s) in subs.iter().enumerate() {
            if !s.constant_term().is_zero() {
                return Err(Error::NonzeroConstantTerm { index });
            }
        }
        let t = subs.iter().map(|s| s.trunc).fold(self.trunc, u32::min);
        let powers = power_tables(self, t, |i| subs[i].truncated(t), MSeries::one(t), MSeries::mul);
        let mut out = MSeries::zero(t);
        for_each_group(self, t, |i, j, ks| {
            let mut inner = MSeries::zero(t);
            for (k, c) in ks {
                for (e, d) in &powers[2][k as usize].terms {
                    inner.add_term(*e, &(c * d));
                }
            }
            let prod = powers[0][i as usize].mul(&powers[1][j as usize]).mul(&inner);
            out = out.add(&prod);
        });
        Ok(out)
    }

    /// Composition with a parameterized curve. Each component must vanish at
    /// `T = 0`; the result is trusted through `min(self.trunc, curve truncs)`.
    pub fn compose_curve(&self, curve: &[USeries; 3]) -> Result<USeries> {
        for (index, s) in curve.iter().enumerate() {
            if !s.coeff(0).is_zero() {
                return Err(Error::NonzeroConstantTerm { index });
            }
        }
        let t = curve.iter().map(|s| s.trunc()).fold(self.trunc, u32::min);
        let powers = power_tables(self, t, |i| curve[i].truncated(t), USeries::one(t), USeries::mul);
        let mut out = USeries::zero(t);
        for_each_group(self, t, |i, j, ks| {
            let mut inner = USeries::zero(t);
            for (k, c) in ks {
                inner = inner.add(&powers[2][k as usize].scale(c));
            }
            let prod = powers[0][i as usize].mul(&powers[1][j as usize]).mul(&inner);
            out = out.add(&prod);
        });
        Ok(out)
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inverse_unit(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let c0_inv = c0.inv().ok_or(Error::NotAUnit)?;
        let mut r = self.scale(&c0_inv);
        r.add_term([0, 0, 0], &-Scalar::one());
        let mut acc = MSeries::one(self.trunc);
        for _ in 0..self.trunc {
            acc = MSeries::one(self.trunc).sub(&r.mul(&acc));
        }
        Ok(acc.scale(&c0_inv))
    }

    /// Renames variables: the exponent of variable `i` moves to slot `perm[i]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let mut r = MSeries::zero(self.trunc);
        for (e, c) in &self.terms {
            let mut f = [0; 3];
            for i in 0..3 {
                f[perm[i]] = e[i];
            }
            r.add_term(f, c);
        }
        r
    }

    /// The restriction to the coordinate axis of `v`, as a series in `T`.
    pub fn restrict_to_axis(&self, v: Var) -> USeries {
        let mut coeffs = vec![Scalar::zero(); self.trunc as usize + 1];
        for (e, c) in &self.terms {
            if degree(e) == e[v.index()] {
                coeffs[e[v.index()] as usize] = c.clone();
            }
        }
        USeries::from_coeffs(coeffs, self.trunc)
    }

    /// Agreement of all coefficients of degree `<= t`.
    pub fn eq_through(&self, o: &MSeries, t: u32) -> bool {
        self.truncated(t).terms == o.truncated(t).terms
    }

    /// Terms in graded-lex order: by total degree, then `x` before `y` before `z`.
    pub fn graded_lex_terms(&self) -> Vec<(Exp, Scalar)> {
        let mut v: Vec<(Exp, Scalar)> = self.terms.iter().map(|(e, c)| (*e, c.clone())).collect();
        v.sort_by(|(a, _), (b, _)| degree(a).cmp(&degree(b)).then_with(|| b.cmp(a)));
        v
    }
}

/// Power tables `P[v][e] = sub_v^e` for the exponents that can contribute
/// below degree `t`.
fn power_tables<S: Clone>(
    s: &MSeries,
    t: u32,
    sub: impl Fn(usize) -> S,
    one: S,
    mul: impl Fn(&S, &S) -> S,
) -> [Vec<S>; 3] {
    let mut max = [0u32; 3];
    for e in s.terms.keys() {
        if degree(e) <= t {
            for i in 0..3 {
                max[i] = max[i].max(e[i]);
            }
        }
    }
    let table = |i: usize| {
        let base = sub(i);
        let mut v = vec![one.clone()];
        for k in 0..max[i] as usize {
            let next = mul(&v[k], &base);
            v.push(next);
        }
        v
    };
    [table(0), table(1), table(2)]
}

/// Groups the terms of degree `<= t` by their `(x, y)` exponents.
fn for_each_group(s: &MSeries, t: u32, mut f: impl FnMut(u32, u32, Vec<(u32, &Scalar)>)) {
    let mut groups: BTreeMap<(u32, u32), Vec<(u32, &Scalar)>> = BTreeMap::new();
    for (e, c) in &s.terms {
        if degree(e) <= t {
            groups.entry((e[0], e[1])).or_default().push((e[2], c));
        }
    }
    for ((i, j), ks) in groups {
        f(i, j, ks);
    }
}

fn format_monomial(e: &Exp) -> String {
    let mut parts = Vec::new();
    for v in Var::ALL {
        match e[v.index()] {
            0 => {}
            1 => parts.push(v.name().to_string()),
            k => parts.push(format!("{}^{}", v.name(), k)),
        }
    }
    parts.join("*")
}

/// A single term in the input syntax, e.g. `-3/2*x^2*z` or `(1+2*i)*y`.
pub(crate) fn format_term(e: &Exp, c: &Scalar) -> String {
    let mono = format_monomial(e);
    if mono.is_empty() {
        let s = c.to_string();
        return if !c.re.is_zero() && !c.im.is_zero() { format!("({})", s) } else { s };
    }
    if c.is_one() {
        return mono;
    }
    if (-c).is_one() {
        return format!("-{}", mono);
    }
    if !c.re.is_zero() && !c.im.is_zero() {
        format!("({})*{}", c, mono)
    } else {
        format!("{}*{}", c, mono)
    }
}

/// Polynomial text in graded-lex order, `0` for the zero series.
impl fmt::Display for MSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.graded_lex_terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (e, c)) in terms.iter().enumerate() {
            let t = format_term(e, c);
            if n == 0 {
                f.write_str(&t)?;
            } else if let Some(rest) = t.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else {
                write!(f, " + {}", t)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [trunc {}]", self, self.trunc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(t: u32) -> MSeries {
        MSeries::var(Var::X, t)
    }
    fn y(t: u32) -> MSeries {
        MSeries::var(Var::Y, t)
    }
    fn z(t: u32) -> MSeries {
        MSeries::var(Var::Z, t)
    }

    #[test]
    fn difference_of_squares() {
        let p = x(8).add(&y(8)).mul(&x(8).sub(&y(8)));
        assert_eq!(p, x(8).pow(2).sub(&y(8).pow(2)));
    }

    #[test]
    fn unit_is_neutral() {
        let s = x(6).mul(&z(6)).add(&y(6).pow(3));
        assert_eq!(s.mul(&MSeries::one(6)), s);
    }

    #[test]
    fn square_beyond_trunc_is_untrusted() {
        let s = x(1).add(&y(1)).add(&z(1)).pow(2);
        assert_eq!(s.trunc(), 1);
        assert!(s.is_zero());
    }

    #[test]
    fn monomial_substitution() {
        let t = 6;
        let subs = [x(t).mul(&z(t)), y(t).mul(&z(t)), z(t)];
        assert_eq!(x(t).mul(&y(t)).substitute(&subs).unwrap(), MSeries::monomial([1, 1, 2], Scalar::one(), t));
        assert_eq!(x(t).substitute(&subs).unwrap(), MSeries::monomial([1, 0, 1], Scalar::one(), t));
    }

    #[test]
    fn constant_term_is_rejected() {
        let subs = [x(4).add(&MSeries::one(4)), y(4), z(4)];
        assert_eq!(x(4).substitute(&subs), Err(Error::NonzeroConstantTerm { index: 0 }));
    }

    #[test]
    fn curve_on_its_graph() {
        let s = y(10).sub(&x(10).pow(2));
        let c = [USeries::monomial(2, Scalar::one(), 10), USeries::monomial(4, Scalar::one(), 10), USeries::zero(10)];
        assert!(s.compose_curve(&c).unwrap().is_zero());
    }

    #[test]
    fn division_by_variable() {
        let s = z(5).pow(2).add(&x(5).mul(&z(5)));
        let q = s.divide_by_variable(Var::Z).unwrap();
        assert_eq!(q, z(4).add(&x(4)));
        assert!(matches!(x(5).divide_by_variable(Var::Z), Err(Error::NotDivisible { var: Var::Z, .. })));
    }

    #[test]
    fn valuations() {
        assert_eq!(z(9).pow(3).add(&z(9).pow(5)).valuation(), Valuation::Finite(3));
        assert_eq!(MSeries::zero(4).valuation(), Valuation::Infinite);
        let f = x(6).mul(&y(6));
        assert_eq!(y(6).add(&z(6).mul(&f)).valuation(), Valuation::Finite(1));
    }

    #[test]
    fn unit_inverse() {
        let u = MSeries::one(7).add(&x(7)).sub(&y(7).mul(&z(7)).scale(&Scalar::from_int(3)));
        let p = u.mul(&u.inverse_unit().unwrap());
        assert_eq!(p, MSeries::one(7));
        assert_eq!(x(3).inverse_unit(), Err(Error::NotAUnit));
    }

    #[test]
    fn graded_lex_display() {
        let s = MSeries::from_terms(
            [([0, 0, 2], Scalar::from_int(-1)), ([1, 1, 0], Scalar::from_ratio(1, 2)), ([0, 1, 0], Scalar::one()), ([2, 0, 0], Scalar::i())],
            5,
        );
        assert_eq!(s.to_string(), "y + 1*i*x^2 + 1/2*x*y - z^2");
    }
}
