use std::fmt;

use super::{Scalar, Valuation};
use crate::error::{Error, Result};

/// Truncated series in one parameter `T`, coefficients `0..=trunc`.
#[derive(Clone, PartialEq, Eq)]
pub struct USeries {
    coeffs: Vec<Scalar>,
}

impl USeries {
    pub fn zero(trunc: u32) -> Self {
        USeries { coeffs: vec![Scalar::zero(); trunc as usize + 1] }
    }

    pub fn one(trunc: u32) -> Self {
        USeries::monomial(0, Scalar::one(), trunc)
    }

    /// The parameter `T` itself.
    pub fn t(trunc: u32) -> Self {
        USeries::monomial(1, Scalar::one(), trunc)
    }

    pub fn monomial(k: u32, c: Scalar, trunc: u32) -> Self {
        let mut s = USeries::zero(trunc);
        if k <= trunc {
            s.coeffs[k as usize] = c;
        }
        s
    }

    /// Pads with zeros or drops coefficients beyond `trunc`.
    pub fn from_coeffs(mut coeffs: Vec<Scalar>, trunc: u32) -> Self {
        coeffs.resize(trunc as usize + 1, Scalar::zero());
        USeries { coeffs }
    }

    pub fn trunc(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    /// Coefficient of `T^k`. Panics for `k > trunc`.
    pub fn coeff(&self, k: u32) -> &Scalar {
        assert!(k <= self.trunc(), "coefficient {} read beyond trunc {}", k, self.trunc());
        &self.coeffs[k as usize]
    }

    pub fn set_coeff(&mut self, k: u32, c: Scalar) {
        assert!(k <= self.trunc(), "coefficient {} written beyond trunc {}", k, self.trunc());
        self.coeffs[k as usize] = c;
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn valuation(&self) -> Valuation {
        self.coeffs.iter().position(|c| !c.is_zero()).map_or(Valuation::Infinite, |k| Valuation::Finite(k as u32))
    }

    pub fn truncated(&self, t: u32) -> Self {
        let t = t.min(self.trunc());
        USeries { coeffs: self.coeffs[..=t as usize].to_vec() }
    }

    pub fn add(&self, o: &USeries) -> Self {
        let t = self.trunc().min(o.trunc()) as usize;
        USeries { coeffs: (0..=t).map(|k| &self.coeffs[k] + &o.coeffs[k]).collect() }
    }

    pub fn sub(&self, o: &USeries) -> Self {
        let t = self.trunc().min(o.trunc()) as usize;
        USeries { coeffs: (0..=t).map(|k| &self.coeffs[k] - &o.coeffs[k]).collect() }
    }

    pub fn neg(&self) -> Self {
        USeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        USeries { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn mul(&self, o: &USeries) -> Self {
        let t = self.trunc().min(o.trunc()) as usize;
        let mut out = vec![Scalar::zero(); t + 1];
        for (i, a) in self.coeffs[..=t].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs[..=t - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        USeries { coeffs: out }
    }

    /// `d/dT`, trusted one degree less.
    pub fn derivative(&self) -> Result<Self> {
        if self.trunc() == 0 {
            return Err(Error::PrecisionExhausted("derivative of a trunc-0 series".into()));
        }
        Ok(USeries { coeffs: (1..self.coeffs.len()).map(|k| self.coeffs[k].scale_int(k as i64)).collect() })
    }

    /// Exact division by `T^p`; `trunc` drops by `p`.
    pub fn divide_by_t_power(&self, p: u32) -> Result<Self> {
        if p > self.trunc() {
            return Err(Error::PrecisionExhausted(format!("division by T^{} at trunc {}", p, self.trunc())));
        }
        if let Some(k) = (0..p as usize).find(|&k| !self.coeffs[k].is_zero()) {
            return Err(Error::DivisionObstructed(format!("coefficient of T^{} is {}", k, self.coeffs[k])));
        }
        Ok(USeries { coeffs: self.coeffs[p as usize..].to_vec() })
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inverse_unit(&self) -> Result<Self> {
        let c0 = self.coeffs[0].inv().ok_or(Error::NotAUnit)?;
        let n = self.coeffs.len();
        let mut inv = vec![Scalar::zero(); n];
        inv[0] = c0.clone();
        for k in 1..n {
            let mut acc = Scalar::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &(&self.coeffs[j] * &inv[k - j]);
                }
            }
            inv[k] = -(&acc * &c0);
        }
        Ok(USeries { coeffs: inv })
    }

    /// Exact quotient `self / d`: both are divided by `T^ord(d)` first.
    pub fn div(&self, d: &USeries) -> Result<Self> {
        let p = d.valuation().finite().ok_or_else(|| Error::DivisionObstructed("divisor vanishes at trusted precision".into()))?;
        let num = self.divide_by_t_power(p)?;
        let den = d.divide_by_t_power(p)?;
        Ok(num.mul(&den.inverse_unit()?))
    }

    /// `self(inner(T))` for `inner` with zero constant term.
    pub fn compose(&self, inner: &USeries) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm { index: 0 });
        }
        let t = self.trunc().min(inner.trunc());
        let inner = inner.truncated(t);
        let mut acc = USeries::zero(t);
        for k in (0..=t as usize).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse of a series `c1 T + ...` with `c1 != 0`.
    pub fn reversion(&self) -> Result<Self> {
        if self.valuation() != Valuation::Finite(1) {
            return Err(Error::DivisionObstructed("reversion needs valuation exactly 1".into()));
        }
        let t = self.trunc();
        let c1_inv = self.coeffs[1].inv().ok_or(Error::NotAUnit)?;
        // Fixed point r = (T - (s(r) - c1 r)) / c1 gains one correct degree per pass.
        let mut r = USeries::t(t).scale(&c1_inv);
        let nonlinear = {
            let mut s = self.clone();
            s.coeffs[1] = Scalar::zero();
            s
        };
        for _ in 0..t {
            r = USeries::t(t).sub(&nonlinear.compose(&r)?).scale(&c1_inv);
        }
        Ok(r)
    }

    /// `self(s^k)`: reparameterization by a power of the new parameter.
    pub fn substitute_power(&self, k: u32) -> Self {
        let t = self.trunc() * k;
        let mut out = USeries::zero(t);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[i * k as usize] = c.clone();
        }
        out
    }
}

impl fmt::Display for USeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({})*T^{}", c, k)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for USeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [trunc {}]", self, self.trunc())
    }
}
