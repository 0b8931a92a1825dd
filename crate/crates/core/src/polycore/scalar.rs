use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Relative magnitude below which float coefficients are dropped.
pub const FLOAT_CHOP: f64 = 1e-13;

/// Coefficient field interface shared by the exact and float backends.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic is exact (zero tests are decisive).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_gauss(g: &GaussRational) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_c64(&self) -> Complex64;
    fn conj(&self) -> Self;

    /// Magnitude used for pivot selection.
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    /// True when the value should be treated as zero relative to `scale`.
    fn is_negligible(&self, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= FLOAT_CHOP * scale.max(1.0)
        }
    }
}

/// Gaussian rational `re + im·i` with arbitrary-precision parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self { re: BigRational::from_integer(re.into()), im: BigRational::from_integer(im.into()) }
    }

    /// `(a/b) + (c/e)·i`.
    pub fn from_fracs(a: i64, b: i64, c: i64, e: i64) -> Self {
        Self {
            re: BigRational::new(BigInt::from(a), BigInt::from(b)),
            im: BigRational::new(BigInt::from(c), BigInt::from(e)),
        }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero() && !self.im.is_zero()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero_val() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self { re: &self.re / &n, im: -(&self.im / &n) })
    }

    fn is_zero_val(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Nearest Gaussian rational to `z` with denominators at most `max_den`,
    /// found by continued fractions on each part.
    pub fn approximate(z: Complex64, max_den: i64) -> Option<Self> {
        Some(Self { re: approx_rational(z.re, max_den)?, im: approx_rational(z.im, max_den)? })
    }
}

fn approx_rational(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    // convergents h/k
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    let num = if neg { -h1 } else { h1 };
    Some(BigRational::new(BigInt::from(num), BigInt::from(k1)))
}

impl Add for GaussRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for GaussRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for GaussRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl<'a> Mul<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn mul(self, o: &GaussRational) -> GaussRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRational::real(&self.re * &o.re);
        }
        GaussRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div for GaussRational {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.inv().expect("division by zero Gaussian rational");
        &self * &inv
    }
}

impl Neg for GaussRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

impl Scalar for GaussRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Self::from_ints(0, 0)
    }
    fn one() -> Self {
        Self::from_ints(1, 0)
    }
    fn is_zero(&self) -> bool {
        self.is_zero_val()
    }
    fn from_gauss(g: &GaussRational) -> Self {
        g.clone()
    }
    fn from_i64(v: i64) -> Self {
        Self::from_ints(v, 0)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back to a ratio of big integers when either part overflows f64
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_gauss(g: &GaussRational) -> Self {
        g.to_c64()
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats a coefficient as a standalone literal, e.g. `3`, `(1/2)`,
/// `(1/2i)`, `(1/2-3i)`.
impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            if self.re.is_integer() {
                write!(f, "{}", self.re.numer())
            } else {
                write!(f, "({})", fmt_rational(&self.re))
            }
        } else if self.re.is_zero() {
            write!(f, "({})", imag_text(&self.im))
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            write!(f, "({}{}{})", fmt_rational(&self.re), sign, imag_text(&self.im.abs()))
        }
    }
}

pub(crate) fn imag_text(im: &BigRational) -> String {
    if im.is_one() {
        "i".to_string()
    } else if (-im.clone()).is_one() {
        "-i".to_string()
    } else {
        format!("{}i", fmt_rational(im))
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_i() {
        let i = GaussRational::i();
        assert_eq!(i.inv().unwrap(), GaussRational::from_ints(0, -1));
        assert!(GaussRational::zero().inv().is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(GaussRational::from_ints(3, 0).to_string(), "3");
        assert_eq!(GaussRational::from_fracs(1, 2, 0, 1).to_string(), "(1/2)");
        assert_eq!(GaussRational::from_fracs(0, 1, 1, 2).to_string(), "(1/2i)");
        assert_eq!(GaussRational::from_fracs(1, 2, -3, 1).to_string(), "(1/2-3i)");
        assert_eq!(GaussRational::from_ints(0, 1).to_string(), "(i)");
    }

    #[test]
    fn continued_fraction_snap() {
        let g = GaussRational::approximate(Complex64::new(0.5, -1.0 / 3.0), 1000).unwrap();
        assert_eq!(g, GaussRational::from_fracs(1, 2, -1, 3));
    }

    #[test]
    fn float_negligible() {
        assert!(Complex64::new(1e-15, 0.0).is_negligible(1.0));
        assert!(!Complex64::new(1e-6, 0.0).is_negligible(1.0));
        assert!(!GaussRational::from_fracs(1, 1_000_000_007, 0, 1).is_negligible(1.0));
    }
}
