//! Multi-indices, the graded reverse-lexicographic order and sparse
//! multivariate polynomials over exact Gaussian rationals or complex floats.
//!
//! Variables are ordered `z1 < z2 < ... < zn`. Two multi-indices of equal
//! total degree compare as `a < b` iff the first nonzero entry of `a - b` is
//! positive, so the monomial carrying more of the low-index variables is the
//! smaller one.

mod poly;
mod scalar;
mod text;

use std::cmp::Ordering;
use std::fmt;

pub use poly::{HomogPolynomial, Polynomial};
pub use scalar::{GaussRational, Scalar, FLOAT_CHOP};
pub use text::{parse_gauss_rational, parse_homogeneous, parse_polynomial, ParseError};

/// Errors raised by polynomial arithmetic and evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("polynomial is not homogeneous of degree {0}")]
    NotHomogeneous(u32),
}

/// Exponent vector of a monomial together with its cached total degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exps: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        let degree = exps.iter().sum();
        Self { exps, degree }
    }

    pub fn zero(n: usize) -> Self {
        Self { exps: vec![0; n], degree: 0 }
    }

    /// The exponent vector of `z_var` (0-based slot).
    pub fn unit(n: usize, var: usize) -> Self {
        let mut exps = vec![0; n];
        exps[var] = 1;
        Self { exps, degree: 1 }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn get(&self, var: usize) -> u32 {
        self.exps[var]
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Self { exps, degree: self.degree + other.degree }
    }

    /// `self - other`, or `None` when `other` does not divide `self`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        debug_assert_eq!(self.len(), other.len());
        let mut exps = Vec::with_capacity(self.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(Self { exps, degree: self.degree - other.degree })
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Self) -> Self {
        Self::new(self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Self) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// True when every variable outside `range` has exponent zero.
    pub fn supported_in(&self, range: std::ops::Range<usize>) -> bool {
        self.exps
            .iter()
            .enumerate()
            .all(|(k, e)| *e == 0 || range.contains(&k))
    }

    /// All exponent vectors in `n` variables of total degree exactly `s`,
    /// sorted ascending in grevlex.
    pub fn of_degree(n: usize, s: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if k + 1 == n {
                cur[k] = left;
                out.push(MultiIndex::new(cur.clone()));
                cur[k] = 0;
                return;
            }
            for e in 0..=left {
                cur[k] = e;
                rec(k + 1, left - e, cur, out);
            }
            cur[k] = 0;
        }
        if n == 0 {
            if s == 0 {
                out.push(MultiIndex::zero(0));
            }
            return out;
        }
        rec(0, s, &mut cur, &mut out);
        out.sort();
        out
    }

    /// All exponent vectors of total degree at most `s`, ascending in grevlex.
    pub fn up_to_degree(n: usize, s: u32) -> Vec<Self> {
        (0..=s).flat_map(|k| Self::of_degree(n, k)).collect()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

/// Compare two multi-indices in grevlex with `z1 < z2 < ... < zn`.
pub fn grevlex_compare(a: &MultiIndex, b: &MultiIndex) -> Result<Ordering, PolyError> {
    if a.len() != b.len() {
        return Err(PolyError::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(grevlex(a, b))
}

fn grevlex(a: &MultiIndex, b: &MultiIndex) -> Ordering {
    match a.degree.cmp(&b.degree) {
        Ordering::Equal => {}
        other => return other,
    }
    for (x, y) in a.exps.iter().zip(&b.exps) {
        if x != y {
            // first nonzero entry of a - b positive => a < b
            return if x > y { Ordering::Less } else { Ordering::Greater };
        }
    }
    Ordering::Equal
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.len(), other.len(), "comparing multi-indices of different length");
        grevlex(self, other)
    }
}

/// Binomial coefficient as `u64`; callers stay far from overflow at desk scale.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn low_variables_are_smaller() {
        assert_eq!(grevlex_compare(&mi(&[1, 0, 0]), &mi(&[0, 0, 1])).unwrap(), Ordering::Less);
        assert_eq!(grevlex_compare(&mi(&[0, 1, 0]), &mi(&[0, 0, 1])).unwrap(), Ordering::Less);
        assert_eq!(grevlex_compare(&mi(&[1, 0, 0]), &mi(&[0, 1, 0])).unwrap(), Ordering::Less);
    }

    #[test]
    fn graded() {
        assert_eq!(grevlex_compare(&mi(&[0, 0, 1]), &mi(&[2, 0, 0])).unwrap(), Ordering::Less);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            grevlex_compare(&mi(&[1, 0]), &mi(&[1, 0, 0])),
            Err(PolyError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sphere_standard_listing_order() {
        // 1, z1, z2, z3, z1^2, z1z2, z1z3, z2^2, z2z3, z3^2
        let got: Vec<_> = MultiIndex::up_to_degree(3, 2).into_iter().map(|m| m.exps().to_vec()).collect();
        let want = vec![
            vec![0, 0, 0],
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![2, 0, 0],
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![0, 2, 0],
            vec![0, 1, 1],
            vec![0, 0, 2],
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 3), 10);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 5), 0);
    }

    fn arb_index(n: usize) -> impl Strategy<Value = MultiIndex> {
        proptest::collection::vec(0u32..5, n).prop_map(MultiIndex::new)
    }

    proptest! {
        #[test]
        fn total_order(a in arb_index(4), b in arb_index(4), c in arb_index(4)) {
            let ab = a.cmp(&b);
            prop_assert_eq!(ab.reverse(), b.cmp(&a));
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            if a < b && b < c {
                prop_assert!(a < c);
            }
        }

        #[test]
        fn compatible_with_multiplication(a in arb_index(3), b in arb_index(3), c in arb_index(3)) {
            if a < b {
                prop_assert!(a.add(&c) < b.add(&c));
            }
        }
    }
}
