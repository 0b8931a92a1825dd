//! Polynomial text grammar.
//!
//! ```text
//! poly    := ["-"] term (("+" | "-") term)*  |  "0"
//! term    := factor ("*" factor)*
//! factor  := number ["i"] | "i" | "(" inner ")" | "z" index ["^" exp]
//! inner   := ["-"] part (("+" | "-") part)*      part := number ["i"] | "i"
//! number  := digits ["/" digits] | digits "." digits
//! ```
//!
//! Canonical output lists terms in decreasing grevlex order, pulls the sign
//! out of purely real or purely imaginary coefficients, omits unit
//! coefficients and prints `0` for the zero polynomial.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::scalar::imag_text;
use super::{GaussRational, MultiIndex, Polynomial, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    n: usize,
    first_index: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<BigRational, ParseError> {
        let whole: BigInt = self.digits()?.parse().expect("digit string");
        if self.s.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac = self.digits()?;
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let f: BigInt = frac.parse().expect("digit string");
            return Ok(BigRational::new(whole * &scale + f, scale));
        }
        if self.eat(b'/') {
            let den: BigInt = self.digits()?.parse().expect("digit string");
            if den.is_zero() {
                return self.err("zero denominator");
            }
            return Ok(BigRational::new(whole, den));
        }
        Ok(BigRational::from_integer(whole))
    }

    /// `number ["i"] | "i"`
    fn part(&mut self) -> Result<GaussRational, ParseError> {
        if self.eat(b'i') {
            return Ok(GaussRational::i());
        }
        let q = self.number()?;
        if self.eat(b'i') {
            Ok(GaussRational::new(BigRational::zero(), q))
        } else {
            Ok(GaussRational::real(q))
        }
    }

    fn inner(&mut self) -> Result<GaussRational, ParseError> {
        let mut acc = GaussRational::zero();
        let mut neg = self.eat(b'-');
        loop {
            let p = self.part()?;
            acc = if neg { acc - p } else { acc + p };
            if self.eat(b'+') {
                neg = false;
            } else if self.eat(b'-') {
                neg = true;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self, coef: &mut GaussRational, mono: &mut [u32]) -> Result<(), ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let c = self.inner()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                *coef = &*coef * &c;
            }
            Some(b'z') => {
                self.pos += 1;
                let idx: usize = match self.digits()?.parse() {
                    Ok(v) => v,
                    Err(_) => return self.err("variable index too large"),
                };
                if idx < self.first_index || idx - self.first_index >= self.n {
                    return self.err(format!("variable z{idx} out of range"));
                }
                let e: u32 = if self.eat(b'^') {
                    match self.digits()?.parse() {
                        Ok(v) => v,
                        Err(_) => return self.err("exponent too large"),
                    }
                } else {
                    1
                };
                mono[idx - self.first_index] += e;
            }
            Some(c) if c == b'i' || c.is_ascii_digit() => {
                let p = self.part()?;
                *coef = &*coef * &p;
            }
            _ => return self.err("expected coefficient or variable"),
        }
        Ok(())
    }

    fn term(&mut self) -> Result<(MultiIndex, GaussRational), ParseError> {
        let mut coef = GaussRational::one();
        let mut mono = vec![0u32; self.n];
        self.factor(&mut coef, &mut mono)?;
        while self.eat(b'*') {
            self.factor(&mut coef, &mut mono)?;
        }
        Ok((MultiIndex::new(mono), coef))
    }

    fn poly(&mut self) -> Result<Polynomial<GaussRational>, ParseError> {
        let mut out = Polynomial::zero(self.n);
        let mut neg = self.eat(b'-');
        loop {
            let (m, c) = self.term()?;
            out.add_term(m, if neg { -c } else { c });
            if self.eat(b'+') {
                neg = false;
            } else if self.eat(b'-') {
                neg = true;
            } else {
                break;
            }
        }
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(out)
    }
}

fn parse_with(s: &str, n: usize, first_index: usize) -> Result<Polynomial<GaussRational>, ParseError> {
    Parser { s: s.as_bytes(), pos: 0, n, first_index }.poly()
}

/// Parse an affine polynomial in `z1..zn`.
pub fn parse_polynomial(s: &str, n: usize) -> Result<Polynomial<GaussRational>, ParseError> {
    parse_with(s, n, 1)
}

/// Parse a polynomial in `z0..zn` (stored with `n+1` slots).
pub fn parse_homogeneous(s: &str, n: usize) -> Result<Polynomial<GaussRational>, ParseError> {
    parse_with(s, n + 1, 0)
}

/// Parse a standalone coefficient literal such as `(1/2-3i)` or `-2`.
pub fn parse_gauss_rational(s: &str) -> Result<GaussRational, ParseError> {
    let p = parse_with(s, 0, 1)?;
    Ok(p.coeff(&MultiIndex::zero(0)))
}

fn fmt_q(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Split a coefficient into (negative, magnitude text or None for 1).
fn coef_text(c: &GaussRational) -> (bool, Option<String>) {
    if c.im.is_zero() {
        let neg = c.re.is_negative();
        let a = c.re.abs();
        if a.is_one() {
            (neg, None)
        } else if a.is_integer() {
            (neg, Some(a.numer().to_string()))
        } else {
            (neg, Some(format!("({})", fmt_q(&a))))
        }
    } else if c.re.is_zero() {
        let neg = c.im.is_negative();
        (neg, Some(format!("({})", imag_text(&c.im.abs()))))
    } else {
        (false, Some(c.to_string()))
    }
}

pub(crate) fn write_poly(
    f: &mut fmt::Formatter<'_>,
    p: &Polynomial<GaussRational>,
    first_index: usize,
) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let (neg, mag) = coef_text(c);
        if k == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        let mut factors: Vec<String> = Vec::new();
        if let Some(t) = mag {
            factors.push(t);
        }
        for (j, e) in m.exps().iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(format!("z{}", j + first_index)),
                _ => factors.push(format!("z{}^{}", j + first_index, e)),
            }
        }
        if factors.is_empty() {
            factors.push("1".into());
        }
        write!(f, "{}", factors.join("*"))?;
    }
    Ok(())
}

/// Canonical text with affine names `z1..zn`.
impl fmt::Display for Polynomial<GaussRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self, 1)
    }
}

/// Canonical text with names `z0..zn`.
impl fmt::Display for super::HomogPolynomial<GaussRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.poly(), 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_example() {
        let p = parse_polynomial("(1/2)*z2 + (1/2i)*z3", 3).unwrap();
        assert_eq!(p.coeff(&MultiIndex::new(vec![0, 1, 0])), GaussRational::from_fracs(1, 2, 0, 1));
        assert_eq!(p.coeff(&MultiIndex::new(vec![0, 0, 1])), GaussRational::from_fracs(0, 1, 1, 2));
        assert_eq!(p.to_string(), "(1/2i)*z3 + (1/2)*z2");
    }

    #[test]
    fn canonical_text() {
        let p = parse_polynomial("-1 + z1^2 + z3^2 + z2^2", 3).unwrap();
        assert_eq!(p.to_string(), "z3^2 + z2^2 + z1^2 - 1");
        let q = parse_polynomial("(1/2-3i)*z1*z2 - (2i) + 0.25*z1", 2).unwrap();
        assert_eq!(q.to_string(), "(1/2-3i)*z1*z2 + (1/4)*z1 - (2i)");
        assert_eq!(Polynomial::<GaussRational>::zero(2).to_string(), "0");
        assert_eq!(parse_polynomial("z1 - z1", 2).unwrap().to_string(), "0");
    }

    #[test]
    fn coefficient_literal() {
        assert_eq!(parse_gauss_rational("(1/2-3i)").unwrap(), GaussRational::from_fracs(1, 2, -3, 1));
        assert_eq!(parse_gauss_rational("-i").unwrap(), GaussRational::from_ints(0, -1));
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_polynomial("z1 + z4", 3).unwrap_err();
        assert_eq!(e.pos, 7);
        assert!(parse_polynomial("z1 +", 3).is_err());
        assert!(parse_polynomial("(1/0)", 3).is_err());
        assert!(parse_polynomial("z1 z2", 3).is_err());
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial<GaussRational>> {
        proptest::collection::vec(
            ((0u32..3, 0u32..3, 0u32..3), (-7i64..7, 1i64..5), (-7i64..7, 1i64..5)),
            0..6,
        )
        .prop_map(|ts| {
            let mut q = Polynomial::zero(3);
            for ((a, b, c), (rn, rd), (inum, id)) in ts {
                q.add_term(MultiIndex::new(vec![a, b, c]), GaussRational::from_fracs(rn, rd, inum, id));
            }
            q
        })
    }

    proptest! {
        #[test]
        fn round_trip(p in arb_poly()) {
            let text = p.to_string();
            let back = parse_polynomial(&text, 3).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_string(), text);
        }

        #[test]
        fn homogeneous_round_trip(p in arb_poly()) {
            let h = p.homogenize();
            let text = h.to_string();
            prop_assert_eq!(parse_homogeneous(&text, 3).unwrap(), h.poly().clone());
        }
    }
}
