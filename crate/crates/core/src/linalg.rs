//! Dense elimination over any [`Scalar`], an incremental sparse echelon
//! space keyed by monomials, and a complex log-determinant.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::polycore::{MultiIndex, Polynomial, Scalar};

/// Relative pivot threshold for float rank decisions.
pub const FLOAT_RANK_TOL: f64 = 1e-10;

fn matrix_scale<C: Scalar>(m: &[Vec<C>]) -> f64 {
    m.iter().flatten().map(|c| c.magnitude()).fold(0.0, f64::max)
}

fn negligible<C: Scalar>(c: &C, scale: f64) -> bool {
    if C::EXACT {
        c.is_zero()
    } else {
        c.magnitude() <= FLOAT_RANK_TOL * scale.max(f64::MIN_POSITIVE)
    }
}

/// Reduce `m` in place to row echelon form; returns the pivot columns.
pub fn row_echelon<C: Scalar>(m: &mut [Vec<C>]) -> Vec<usize> {
    let scale = matrix_scale(m);
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let pick = if C::EXACT {
            (r..rows).find(|&i| !m[i][c].is_zero())
        } else {
            (r..rows)
                .max_by(|&a, &b| m[a][c].magnitude().total_cmp(&m[b][c].magnitude()).then(b.cmp(&a)))
                .filter(|&i| !negligible(&m[i][c], scale))
        };
        let Some(p) = pick else { continue };
        m.swap(r, p);
        let inv = C::one() / m[r][c].clone();
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() * inv.clone();
            for k in c..cols {
                let v = m[i][k].clone() - f.clone() * m[r][k].clone();
                m[i][k] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<C: Scalar>(rows: &[Vec<C>]) -> usize {
    let mut m = rows.to_vec();
    row_echelon(&mut m).len()
}

/// Determinant of a square matrix by elimination.
pub fn determinant<C: Scalar>(a: &[Vec<C>]) -> C {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = C::one();
    for c in 0..n {
        let pick = if C::EXACT {
            (c..n).find(|&i| !m[i][c].is_zero())
        } else {
            (c..n).max_by(|&x, &y| m[x][c].magnitude().total_cmp(&m[y][c].magnitude()))
        };
        let Some(p) = pick else { return C::zero() };
        if m[p][c].is_zero() {
            return C::zero();
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det = det * m[c][c].clone();
        let inv = C::one() / m[c][c].clone();
        for i in c + 1..n {
            let f = m[i][c].clone() * inv.clone();
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let v = m[i][k].clone() - f.clone() * m[c][k].clone();
                m[i][k] = v;
            }
        }
    }
    det
}

/// Solve `a x = b` for a (possibly overdetermined) consistent system.
/// Free variables are set to zero; `None` when the system is inconsistent.
pub fn solve<C: Scalar>(a: &[Vec<C>], b: &[C]) -> Option<Vec<C>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<C>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = row_echelon(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![C::zero(); cols];
    for (r, &c) in pivots.iter().enumerate().rev() {
        let mut acc = aug[r][cols].clone();
        for k in c + 1..cols {
            acc = acc - aug[r][k].clone() * x[k].clone();
        }
        x[c] = acc / aug[r][c].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse<C: Scalar>(a: &[Vec<C>]) -> Option<Vec<Vec<C>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<C> = (0..n).map(|i| if i == j { C::one() } else { C::zero() }).collect();
        cols.push(solve(a, &e)?);
    }
    if rank(a) < n {
        return None;
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

/// Incrementally built span of sparse vectors indexed by monomials.
///
/// Rows are kept with pairwise distinct leading monomials, so membership is
/// decided by leading-term reduction. Each row remembers its coordinates in
/// terms of the accepted input vectors, numbered in acceptance order.
#[derive(Clone, Debug)]
pub struct EchelonSpace<C: Scalar> {
    rows: BTreeMap<MultiIndex, (Polynomial<C>, BTreeMap<usize, C>)>,
    accepted: usize,
}

impl<C: Scalar> Default for EchelonSpace<C> {
    fn default() -> Self {
        Self { rows: BTreeMap::new(), accepted: 0 }
    }
}

impl<C: Scalar> EchelonSpace<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.accepted
    }

    /// Reduce `v`; returns the remainder and the coordinates of `v - remainder`.
    pub fn reduce(&self, v: &Polynomial<C>) -> (Polynomial<C>, BTreeMap<usize, C>) {
        let mut rem = v.clone();
        let mut coords: BTreeMap<usize, C> = BTreeMap::new();
        let mut kept = Polynomial::zero(v.nvars());
        while let Some((lm, lc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            match self.rows.get(&lm) {
                Some((row, rc)) => {
                    let f = lc / row.leading().expect("nonzero row").1.clone();
                    rem.add_scaled_shifted(row, &MultiIndex::zero(v.nvars()), &-f.clone());
                    rem.take_term(&lm);
                    for (k, c) in rc {
                        let e = coords.entry(*k).or_insert_with(C::zero);
                        *e = e.clone() + f.clone() * c.clone();
                    }
                }
                None => {
                    rem.take_term(&lm);
                    kept.add_term(lm, lc);
                }
            }
        }
        coords.retain(|_, c| !c.is_zero());
        (kept, coords)
    }

    /// Add `v` if it is independent; returns whether it was accepted.
    pub fn insert(&mut self, v: &Polynomial<C>) -> bool {
        let (rem, coords) = self.reduce(v);
        let Some(lm) = rem.leading_monomial().cloned() else { return false };
        // rem = v - Σ coords_k e_k
        let mut rc: BTreeMap<usize, C> = coords.into_iter().map(|(k, c)| (k, -c)).collect();
        rc.insert(self.accepted, C::one());
        self.rows.insert(lm, (rem, rc));
        self.accepted += 1;
        true
    }

    /// Coordinates of `v` in the accepted vectors, `None` if outside the span.
    pub fn express(&self, v: &Polynomial<C>) -> Option<BTreeMap<usize, C>> {
        let (rem, coords) = self.reduce(v);
        rem.is_zero().then_some(coords)
    }
}

/// Pivot threshold relative to the largest entry for [`log_abs_det`].
pub const LOGDET_PIVOT_TOL: f64 = 1e-13;

/// `log|det a|` for a row-major `n×n` complex matrix by partial-pivot LU,
/// `-∞` when a pivot falls below the relative threshold.
pub fn log_abs_det(mut a: Vec<Complex64>, n: usize) -> f64 {
    assert_eq!(a.len(), n * n, "matrix shape");
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if n == 0 {
        return 0.0;
    }
    if scale == 0.0 || !scale.is_finite() {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for c in 0..n {
        let (p, best) = (c..n)
            .map(|r| (r, a[r * n + c].norm()))
            .fold((c, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= LOGDET_PIVOT_TOL * scale {
            return f64::NEG_INFINITY;
        }
        if p != c {
            for k in 0..n {
                a.swap(c * n + k, p * n + k);
            }
        }
        let piv = a[c * n + c];
        acc += best.ln();
        for r in c + 1..n {
            let f = a[r * n + c] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for k in c + 1..n {
                let v = a[c * n + k];
                a[r * n + k] -= f * v;
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{parse_polynomial, GaussRational};
    use proptest::prelude::*;

    type Q = GaussRational;

    fn q(a: i64) -> Q {
        Q::from_i64(a)
    }

    #[test]
    fn exact_rank_and_det() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(rank(&m), 1);
        assert!(determinant(&m).is_zero());
        let m = vec![vec![Q::from_fracs(1, 2, 0, 1), Q::from_fracs(0, 1, 1, 2)], vec![Q::from_fracs(1, 2, 0, 1), Q::from_fracs(0, 1, -1, 2)]];
        assert_eq!(determinant(&m), Q::from_fracs(0, 1, -1, 2));
    }

    #[test]
    fn overdetermined_solve() {
        let a = vec![vec![q(1), q(0)], vec![q(0), q(1)], vec![q(1), q(1)]];
        assert_eq!(solve(&a, &[q(2), q(3), q(5)]).unwrap(), vec![q(2), q(3)]);
        assert!(solve(&a, &[q(2), q(3), q(6)]).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![q(1), q(-1)], vec![q(-1), q(2)]]);
        assert!(inverse(&[vec![q(1), q(1)], vec![q(1), q(1)]]).is_none());
    }

    #[test]
    fn echelon_space_expresses() {
        let mut sp = EchelonSpace::<Q>::new();
        let a = parse_polynomial("z1 + z2", 2).unwrap();
        let b = parse_polynomial("z1 - z2", 2).unwrap();
        assert!(sp.insert(&a));
        assert!(sp.insert(&b));
        assert!(!sp.insert(&parse_polynomial("z2", 2).unwrap()));
        let c = sp.express(&parse_polynomial("z1", 2).unwrap()).unwrap();
        assert_eq!(c[&0], Q::from_fracs(1, 2, 0, 1));
        assert_eq!(c[&1], Q::from_fracs(1, 2, 0, 1));
        assert!(sp.express(&parse_polynomial("1", 2).unwrap()).is_none());
    }

    #[test]
    fn logdet_small() {
        let c = |x: f64| Complex64::new(x, 0.0);
        assert!((log_abs_det(vec![c(2.0), c(1.0), c(1.0), c(3.0)], 2) - 5f64.ln()).abs() < 1e-14);
        assert_eq!(log_abs_det(vec![c(1.0), c(1.0), c(1.0), c(1.0)], 2), f64::NEG_INFINITY);
    }

    proptest! {
        #[test]
        fn logdet_matches_direct_det(v in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 9)) {
            let a: Vec<Complex64> = v.iter().map(|(x, y)| Complex64::new(*x, *y)).collect();
            let rows: Vec<Vec<Complex64>> = a.chunks(3).map(|r| r.to_vec()).collect();
            let d = determinant(&rows).norm();
            prop_assume!(d > 1e-6);
            prop_assert!((log_abs_det(a, 3) - d.ln()).abs() < 1e-8);
        }

        #[test]
        fn column_scaling_shifts_logdet(v in proptest::collection::vec(-2.0f64..2.0, 9), k in 0usize..3, e in -3i32..4) {
            let a: Vec<Complex64> = v.iter().map(|x| Complex64::new(*x, 0.5 * x)).collect();
            let base = log_abs_det(a.clone(), 3);
            prop_assume!(base.is_finite());
            let mut b = a;
            for r in 0..3 {
                b[r * 3 + k] *= 10f64.powi(e);
            }
            prop_assert!((log_abs_det(b, 3) - base - e as f64 * 10f64.ln()).abs() < 1e-9);
        }
    }
}
