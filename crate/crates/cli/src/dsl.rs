//! Input syntax: a bracketed triple of polynomial expressions in `x, y, z`
//! over the Gaussian rationals, e.g. `[y - z, x*z, z^3]`.
//!
//! ```text
//! triple := '[' expr ',' expr ',' expr ']'
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' digits)?
//! atom   := digits | 'i' | variable | '(' expr ')'
//! ```
//!
//! Division is only allowed by nonzero constants.

use std::fmt;

use folia_core::{FormalCurve, MSeries, Scalar, USeries, Var, VectorField};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Zero-based character offset.
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.pos + 1, self.msg)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = std::result::Result<T, ParseError>;

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    /// Variable names and the slot each one maps to.
    vars: &'a [(char, Var)],
    trunc: u32,
}

impl<'a> Parser<'a> {
    fn new(src: &str, vars: &'a [(char, Var)], trunc: u32) -> Self {
        Parser { chars: src.chars().collect(), pos: 0, vars, trunc }
    }

    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => self.err(self.pos, format!("expected '{}', found '{}'", c, d)),
            None => self.err(self.pos, format!("expected '{}', found end of input", c)),
        }
    }

    fn end(&mut self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(d) => self.err(self.pos, format!("unexpected '{}' after end of input", d)),
        }
    }

    fn digits(&mut self) -> PResult<num_bigint::BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err(start, "expected a number");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("ascii digits"))
    }

    fn expr(&mut self) -> PResult<MSeries> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> PResult<MSeries> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some('/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    let c = d.constant_term();
                    if d.terms().any(|(e, _)| e.iter().any(|&k| k > 0)) {
                        return self.err(at, "division by a non-constant expression");
                    }
                    let inv = match c.inv() {
                        Some(inv) => inv,
                        None => return self.err(at, "division by zero"),
                    };
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> PResult<MSeries> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> PResult<MSeries> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let at = self.pos;
            let n = self.digits()?;
            let n: u32 = match n.try_into() {
                Ok(n) if n <= 4 * self.trunc.max(1) => n,
                _ => return self.err(at, "exponent too large"),
            };
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<MSeries> {
        let t = self.trunc;
        let Some(c) = self.peek() else {
            return self.err(self.pos, "unexpected end of input");
        };
        if c.is_ascii_digit() {
            let n = self.digits()?;
            return Ok(MSeries::constant(Scalar::real(n.into()), t));
        }
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if c == 'i' {
            self.pos += 1;
            return Ok(MSeries::constant(Scalar::i(), t));
        }
        if let Some(&(_, v)) = self.vars.iter().find(|(name, _)| *name == c) {
            self.pos += 1;
            return Ok(MSeries::var(v, t));
        }
        self.err(self.pos, format!("unexpected '{}'", c))
    }
}

const FIELD_VARS: [(char, Var); 3] = [('x', Var::X), ('y', Var::Y), ('z', Var::Z)];

/// A single polynomial in `x, y, z`.
pub fn parse_series(src: &str, trunc: u32) -> PResult<MSeries> {
    let mut p = Parser::new(src, &FIELD_VARS, trunc);
    let e = p.expr()?;
    p.end()?;
    Ok(e)
}

fn triple(src: &str, vars: &[(char, Var)], trunc: u32) -> PResult<[MSeries; 3]> {
    let mut p = Parser::new(src, vars, trunc);
    p.expect('[')?;
    let a = p.expr()?;
    p.expect(',')?;
    let b = p.expr()?;
    p.expect(',')?;
    let c = p.expr()?;
    p.expect(']')?;
    p.end()?;
    Ok([a, b, c])
}

/// `[F, G, H]` for `F d/dx + G d/dy + H d/dz`.
pub fn parse_field(src: &str, trunc: u32) -> PResult<VectorField> {
    Ok(VectorField::from_comps(triple(src, &FIELD_VARS, trunc)?))
}

/// A univariate polynomial in `var`.
pub fn parse_univariate(src: &str, var: char, trunc: u32) -> PResult<USeries> {
    let vars = [(var, Var::X)];
    let mut p = Parser::new(src, &vars, trunc);
    let e = p.expr()?;
    p.end()?;
    Ok(e.restrict_to_axis(Var::X))
}

/// `[x(t), y(t), z(t)]`, a parameterized curve through the origin.
pub fn parse_curve(src: &str, trunc: u32) -> PResult<[USeries; 3]> {
    let vars = [('t', Var::X)];
    Ok(triple(src, &vars, trunc)?.map(|s| s.restrict_to_axis(Var::X)))
}

/// Canonical text accepted back by [`parse_field`].
pub fn print_field(x: &VectorField) -> String {
    x.to_string()
}

/// Canonical text accepted back by [`parse_curve`].
pub fn print_curve(phi: &FormalCurve) -> String {
    let parts: Vec<String> = phi
        .phi()
        .iter()
        .map(|s| {
            let m = MSeries::from_terms(
                s.coeffs().iter().enumerate().map(|(k, c)| ([k as u32, 0, 0], c.clone())),
                s.trunc() + 1,
            );
            m.to_string().replace('x', "t")
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_gaussian_rational_coefficients() {
        let s = parse_series("(1/2 + 3*i/4)*x^2 - y*z/3 + 2", 8).unwrap();
        assert_eq!(s.coeff(&[2, 0, 0]), &Scalar::from_ratio(1, 2) + &(&Scalar::i() * &Scalar::from_ratio(3, 4)));
        assert_eq!(s.coeff(&[0, 1, 1]), Scalar::from_ratio(-1, 3));
        assert_eq!(s.constant_term(), Scalar::from_int(2));
    }

    #[test]
    fn print_parse_round_trip() {
        let src = "[y - (1-i)*z + 3/2*x*z, z*x - 7*y^2, z^3 - i*x^2*y]";
        let x = parse_field(src, 10).unwrap();
        let printed = print_field(&x);
        let again = parse_field(&printed, 10).unwrap();
        assert_eq!(again, x);
        assert_eq!(print_field(&again), printed);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_field("[x, y z, z]", 8).unwrap_err().pos, 6);
        assert_eq!(parse_field("[x, y, w]", 8).unwrap_err().pos, 7);
        assert_eq!(parse_field("[x, y/(x+1), z]", 8).unwrap_err().msg, "division by a non-constant expression");
        assert_eq!(parse_field("[x, y, z", 8).unwrap_err().msg, "expected ']', found end of input");
        assert_eq!(parse_series("x/0", 8).unwrap_err().msg, "division by zero");
    }

    #[test]
    fn curves() {
        let c = parse_curve("[t^2, -t^4/2, t]", 10).unwrap();
        assert_eq!(c[1].coeff(4), &Scalar::from_ratio(-1, 2));
        let phi = FormalCurve::new(c).unwrap();
        assert_eq!(parse_curve(&print_curve(&phi), 10).unwrap(), phi.phi().clone());
    }
}
