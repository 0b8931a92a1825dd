use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{GaussRational, MultiIndex, PolyError, Scalar};

/// Sparse polynomial in `n` variables. Terms are kept in a grevlex-sorted
/// map, so the last entry is the leading term. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq)]
pub struct Polynomial<C: Scalar> {
    n: usize,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: Scalar> Polynomial<C> {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: C) -> Self {
        Self::monomial(MultiIndex::zero(n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, C::one())
    }

    pub fn monomial(mi: MultiIndex, c: C) -> Self {
        let n = mi.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mi, c);
        }
        Self { n, terms }
    }

    /// The variable in 0-based slot `k` (printed as `z{k+1}` in affine text).
    pub fn var(n: usize, k: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, k), C::one())
    }

    /// Build from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (MultiIndex, C)>,
    {
        let mut p = Self::zero(n);
        for (mi, c) in terms {
            if mi.len() != n {
                return Err(PolyError::DimensionMismatch { expected: n, found: mi.len() });
            }
            p.add_term(mi, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|m| m.degree() as i64).max().unwrap_or(-1)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<MultiIndex, C> {
        self.terms
    }

    pub fn coeff(&self, mi: &MultiIndex) -> C {
        self.terms.get(mi).cloned().unwrap_or_else(C::zero)
    }

    pub fn leading(&self) -> Option<(&MultiIndex, &C)> {
        self.terms.iter().next_back()
    }

    pub fn leading_monomial(&self) -> Option<&MultiIndex> {
        self.terms.keys().next_back()
    }

    /// Largest coefficient magnitude, 0 for the zero polynomial.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Add `c·z^mi` in place.
    pub fn add_term(&mut self, mi: MultiIndex, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&mi) {
            Some(old) => {
                let scale = old.magnitude().max(c.magnitude());
                let sum = old + c;
                if !sum.is_negligible(scale) {
                    self.terms.insert(mi, sum);
                }
            }
            None => {
                self.terms.insert(mi, c);
            }
        }
    }

    /// Remove and return the term at `mi`.
    pub fn take_term(&mut self, mi: &MultiIndex) -> Option<C> {
        self.terms.remove(mi)
    }

    fn check_n(&self, other: &Self) -> Result<(), PolyError> {
        if self.n != other.n {
            return Err(PolyError::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_n(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_n(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_n(other)?;
        let mut out = Self::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.add(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (m.clone(), a.clone() * c.clone()))
            .filter(|(_, a)| !a.is_zero())
            .collect();
        Self { n: self.n, terms }
    }

    /// `c·z^mi·self`.
    pub fn mul_term(&self, mi: &MultiIndex, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (m.add(mi), a.clone() * c.clone()))
            .filter(|(_, a)| !a.is_zero())
            .collect();
        Self { n: self.n, terms }
    }

    /// `self += c·z^mi·other`.
    pub fn add_scaled_shifted(&mut self, other: &Self, mi: &MultiIndex, c: &C) {
        for (m, a) in &other.terms {
            self.add_term(m.add(mi), a.clone() * c.clone());
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Terms of total degree exactly `k`.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == k)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Self { n: self.n, terms }
    }

    /// Terms of total degree at most `k`.
    pub fn truncate_degree(&self, k: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() <= k)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Self { n: self.n, terms }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|m| m.degree());
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Partial derivative with respect to slot `k`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.get(k);
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[k] -= 1;
            out.add_term(MultiIndex::new(exps), c.clone() * C::from_i64(e as i64));
        }
        out
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Polynomial { n: self.n, terms }
    }

    pub fn to_float(&self) -> Polynomial<Complex64> {
        self.map_coeffs(|c| c.to_c64())
    }

    /// Divide by the leading coefficient. The zero polynomial is returned as is.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) => {
                let inv = C::one() / c.clone();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Value at a complex point of length `n`.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64, PolyError> {
        if point.len() != self.n {
            return Err(PolyError::DimensionMismatch { expected: self.n, found: point.len() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = c.to_c64();
            for (x, e) in point.iter().zip(m.exps()) {
                if *e > 0 {
                    v *= x.powu(*e);
                }
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Homogenize to its own total degree with the new variable in slot 0.
    pub fn homogenize(&self) -> HomogPolynomial<C> {
        let d = self.degree().max(0) as u32;
        self.homogenize_to(d).expect("degree is at least the polynomial's degree")
    }

    /// Homogenize to degree `d ≥ deg self`.
    pub fn homogenize_to(&self, d: u32) -> Result<HomogPolynomial<C>, PolyError> {
        if self.degree() > d as i64 {
            return Err(PolyError::NotHomogeneous(d));
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = Vec::with_capacity(self.n + 1);
                exps.push(d - m.degree());
                exps.extend_from_slice(m.exps());
                (MultiIndex::new(exps), c.clone())
            })
            .collect();
        Ok(HomogPolynomial { poly: Polynomial { n: self.n + 1, terms }, degree: d })
    }

    /// Substitute slot `k` by the constant `value` (float coefficients).
    pub fn specialize(&self, k: usize, value: &C) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let mut exps = m.exps().to_vec();
            let e = exps[k];
            exps[k] = 0;
            let mut f = c.clone();
            for _ in 0..e {
                f = f * value.clone();
            }
            out.add_term(MultiIndex::new(exps), f);
        }
        out
    }

    /// Apply a linear change of variables `z_j ↦ Σ_k T[j][k] z_k`.
    pub fn linear_substitution(&self, t: &[Vec<C>]) -> Result<Self, PolyError> {
        if t.len() != self.n || t.iter().any(|row| row.len() != self.n) {
            return Err(PolyError::DimensionMismatch { expected: self.n, found: t.len() });
        }
        let images: Vec<Self> = t
            .iter()
            .map(|row| {
                let mut p = Self::zero(self.n);
                for (k, c) in row.iter().enumerate() {
                    p.add_term(MultiIndex::unit(self.n, k), c.clone());
                }
                p
            })
            .collect();
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let mut term = Self::constant(self.n, c.clone());
            for (j, e) in m.exps().iter().enumerate() {
                for _ in 0..*e {
                    term = &term * &images[j];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }
}

impl Polynomial<GaussRational> {
    /// Denominator-free check helper: true when all coefficients are real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }
}

impl<C: Scalar> std::fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut list = f.debug_map();
        for (m, c) in self.terms.iter().rev() {
            list.entry(m, c);
        }
        list.finish()
    }
}

impl<C: Scalar> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, o: &Polynomial<C>) -> Polynomial<C> {
        self.checked_add(o).expect("polynomial variable count mismatch")
    }
}

impl<C: Scalar> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, o: &Polynomial<C>) -> Polynomial<C> {
        self.checked_sub(o).expect("polynomial variable count mismatch")
    }
}

impl<C: Scalar> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, o: &Polynomial<C>) -> Polynomial<C> {
        self.checked_mul(o).expect("polynomial variable count mismatch")
    }
}

impl<C: Scalar> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.scale(&-C::one())
    }
}

/// Homogeneous polynomial in `z0..zn`, stored with `n+1` slots.
#[derive(Clone, PartialEq, Debug)]
pub struct HomogPolynomial<C: Scalar> {
    poly: Polynomial<C>,
    degree: u32,
}

impl<C: Scalar> HomogPolynomial<C> {
    pub fn new(poly: Polynomial<C>, degree: u32) -> Result<Self, PolyError> {
        if poly.terms().any(|(m, _)| m.degree() != degree) {
            return Err(PolyError::NotHomogeneous(degree));
        }
        Ok(Self { poly, degree })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn poly(&self) -> &Polynomial<C> {
        &self.poly
    }

    /// Number of affine variables `n` (one less than the slot count).
    pub fn affine_nvars(&self) -> usize {
        self.poly.nvars() - 1
    }

    /// Set `z0 = 1`.
    pub fn dehomogenize(&self) -> Polynomial<C> {
        let n = self.affine_nvars();
        let mut out = Polynomial::zero(n);
        for (m, c) in self.poly.terms() {
            out.add_term(MultiIndex::new(m.exps()[1..].to_vec()), c.clone());
        }
        out
    }

    /// Evaluate at a projective representative of length `n+1`.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64, PolyError> {
        self.poly.evaluate(point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::parse_polynomial;
    use proptest::prelude::*;

    type Q = GaussRational;

    fn p(s: &str, n: usize) -> Polynomial<Q> {
        parse_polynomial(s, n).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = p("(1/2)*z2 + (1/2i)*z3", 3);
        let b = p("(1/2)*z2 - (1/2i)*z3", 3);
        assert_eq!(&a * &b, p("(1/4)*z2^2 + (1/4)*z3^2", 3));
        let c = p("z3 + (i)*z2", 3);
        let d = p("z3 - (i)*z2", 3);
        assert_eq!(&c * &d, p("z2^2 + z3^2", 3));
        assert_eq!(&a * &Polynomial::one(3), a);
    }

    #[test]
    fn sphere_leading_term() {
        let f = p("z1^2 + z2^2 + z3^2 - 1", 3);
        assert_eq!(f.leading_monomial().unwrap().exps(), &[0, 0, 2]);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = p("z1", 2);
        let b = p("z1", 3);
        assert!(matches!(a.checked_mul(&b), Err(PolyError::DimensionMismatch { .. })));
        assert!(a.evaluate(&[Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn zero_degree_sentinel() {
        assert_eq!(Polynomial::<Q>::zero(2).degree(), -1);
        assert_eq!(Polynomial::<Q>::one(2).degree(), 0);
    }

    #[test]
    fn homogenize_sphere() {
        let f = p("z1^2 + z2^2 + z3^2 - 1", 3);
        let h = f.homogenize();
        assert_eq!(h.degree(), 2);
        let want = crate::polycore::text::parse_homogeneous("z1^2 + z2^2 + z3^2 - z0^2", 3).unwrap();
        assert_eq!(h.poly(), &want);
        assert_eq!(h.dehomogenize(), f);
        let five = Polynomial::constant(2, Q::from_i64(5));
        assert_eq!(five.homogenize().degree(), 0);
        assert_eq!(five.homogenize().dehomogenize(), five);
    }

    #[test]
    fn dehomogenize_sets_z0_to_one() {
        let h = crate::polycore::text::parse_homogeneous("z0*z1 + z2^2", 2).unwrap();
        let h = HomogPolynomial::new(h, 2).unwrap();
        assert_eq!(h.dehomogenize(), p("z1 + z2^2", 2));
    }

    #[test]
    fn interpolant_values_at_infinity() {
        let v1 = crate::polycore::text::parse_homogeneous("(1/2)*z2 + (1/2i)*z3", 3).unwrap();
        let v1 = HomogPolynomial::new(v1, 1).unwrap();
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let at_minus_i = v1.evaluate(&[c(0., 0.), c(0., 0.), c(1., 0.), c(0., -1.)]).unwrap();
        let at_plus_i = v1.evaluate(&[c(0., 0.), c(0., 0.), c(1., 0.), c(0., 1.)]).unwrap();
        assert!((at_minus_i - c(1.0, 0.0)).norm() < 1e-15);
        assert!(at_plus_i.norm() < 1e-15);
        assert_eq!(Polynomial::<Q>::one(3).evaluate(&[c(3., 1.); 3]).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn derivative_and_specialize() {
        let f = p("z1^2*z2 + 3*z2", 2);
        assert_eq!(f.derivative(0), p("2*z1*z2", 2));
        assert_eq!(f.specialize(0, &Q::from_i64(2)), p("7*z2", 2));
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial<Q>> {
        proptest::collection::vec(((0u32..3, 0u32..3, 0u32..3), -5i64..5, -5i64..5), 0..5).prop_map(|ts| {
            let mut q = Polynomial::zero(3);
            for ((a, b, c), re, im) in ts {
                q.add_term(MultiIndex::new(vec![a, b, c]), Q::from_ints(re, im));
            }
            q
        })
    }

    fn arb_point() -> impl Strategy<Value = Vec<Complex64>> {
        proptest::collection::vec((-1.5f64..1.5, -1.5f64..1.5), 3)
            .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
    }

    proptest! {
        #[test]
        fn exact_product_matches_float_evaluation(a in arb_poly(), b in arb_poly(), x in arb_point()) {
            let prod = (&a * &b).evaluate(&x).unwrap();
            let sep = a.evaluate(&x).unwrap() * b.evaluate(&x).unwrap();
            prop_assert!((prod - sep).norm() <= 1e-10 * (1.0 + sep.norm()));
        }

        #[test]
        fn homogenize_round_trip(a in arb_poly()) {
            prop_assert_eq!(a.homogenize().dehomogenize(), a.clone());
            prop_assert!(a.homogenize().poly().is_homogeneous());
        }

        #[test]
        fn product_term_bound(a in arb_poly(), b in arb_poly()) {
            prop_assert!((&a * &b).len() <= a.len() * b.len());
        }
    }
}
