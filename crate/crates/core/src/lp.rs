//! Discrete complex minimax `min_c max_k |T(ζ_k) + Σ_j c_j E_j(ζ_k)|` as a
//! phase-discretized linear program, solved by constraint generation.
//!
//! The free columns are orthonormalized over the samples first, which keeps
//! the LP well scaled even when the original family is badly conditioned.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Solution, Variable};
use num_complex::Complex64;

/// Relative size below which an orthogonalized column is dropped.
const MGS_DROP_TOL: f64 = 1e-11;
/// Imaginary parts below this fraction of the data scale count as real.
const REAL_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct MinimaxOptions {
    /// Phase count `q` of the modulus discretization.
    pub phases: usize,
    /// Feasibility tolerance on cut violations (relative to the scaled problem).
    pub tol: f64,
    /// Extra rounds of exact-phase cuts after the `q`-phase problem converges.
    pub refine_rounds: usize,
    /// Constraints added per round.
    pub cut_batch: usize,
    pub max_rounds: usize,
}

impl Default for MinimaxOptions {
    fn default() -> Self {
        Self { phases: 32, tol: 1e-9, refine_rounds: 30, cut_batch: 24, max_rounds: 400 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimaxSolution {
    /// `max_k |p(ζ_k)|` of the returned polynomial.
    pub value: f64,
    /// LP objective; a lower bound on the discrete minimax.
    pub lower: f64,
    /// Coefficients on the free columns.
    pub coeffs: Vec<Complex64>,
    /// Whether the problem was solved over the reals with `q = 2`.
    pub real: bool,
    pub phases: usize,
    pub rounds: usize,
    pub constraints: usize,
    /// Number of free columns kept after orthogonalization.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("minimax problem has no samples")]
    NoSamples,
    #[error("column {col} has {found} samples, expected {expected}")]
    Shape { col: usize, expected: usize, found: usize },
    #[error("non-finite sample value")]
    NonFinite,
    #[error("LP solver failed: {0}")]
    Solver(String),
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal columns with the data needed to map coefficients back.
struct Orthonormal {
    q: Vec<Vec<Complex64>>,
    /// Source column of each kept vector.
    source: Vec<usize>,
    /// `r[j][l]` for `l < j`: component of column `source[j]` along `q[l]`.
    r: Vec<Vec<Complex64>>,
    rho: Vec<f64>,
}

fn orthonormalize(cols: &[Vec<Complex64>], real: bool) -> Orthonormal {
    let mut out = Orthonormal { q: Vec::new(), source: Vec::new(), r: Vec::new(), rho: Vec::new() };
    for (k, col) in cols.iter().enumerate() {
        let base = norm(col);
        if base == 0.0 {
            continue;
        }
        let mut v = col.clone();
        let mut rk = vec![Complex64::new(0.0, 0.0); out.q.len()];
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for (l, ql) in out.q.iter().enumerate() {
                let mut c = dot(ql, &v);
                if real {
                    c.im = 0.0;
                }
                for (x, y) in v.iter_mut().zip(ql) {
                    *x -= c * y;
                }
                rk[l] += c;
            }
        }
        let nv = norm(&v);
        if nv <= MGS_DROP_TOL * base {
            continue;
        }
        for x in &mut v {
            *x /= nv;
        }
        out.q.push(v);
        out.source.push(k);
        out.r.push(rk);
        out.rho.push(nv);
    }
    out
}

impl Orthonormal {
    /// Coefficients on the original columns of `Σ_j c_j q_j`.
    fn back_substitute(&self, mut c: Vec<Complex64>, ncols: usize) -> Vec<Complex64> {
        let mut a = vec![Complex64::new(0.0, 0.0); ncols];
        for j in (0..self.q.len()).rev() {
            let x = c[j] / self.rho[j];
            a[self.source[j]] += x;
            for l in 0..j {
                c[l] -= x * self.r[j][l];
            }
        }
        a
    }
}

fn phase(a: usize, q: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * a as f64 / q as f64)
}

/// Grid phase index that best aligns `w·p` with the positive reals.
fn best_phase(p: Complex64, q: usize) -> usize {
    let x = -p.arg() * q as f64 / (2.0 * PI);
    (x.round() as i64).rem_euclid(q as i64) as usize
}

struct Lp<'a> {
    q: &'a [Vec<Complex64>],
    r: &'a [Complex64],
    real: bool,
    u: Variable,
    x: Vec<Variable>,
    y: Vec<Variable>,
}

impl Lp<'_> {
    fn row(&self, k: usize, w: Complex64) -> (LinearExpr, f64) {
        let mut e = LinearExpr::empty();
        e.add(self.u, -1.0);
        for (j, qj) in self.q.iter().enumerate() {
            let z = w * qj[k];
            e.add(self.x[j], z.re);
            if !self.real {
                e.add(self.y[j], -z.im);
            }
        }
        (e, -(w * self.r[k]).re)
    }

    fn coeffs(&self, sol: &Solution) -> Vec<Complex64> {
        (0..self.x.len())
            .map(|j| {
                let im = if self.real { 0.0 } else { sol.var_value(self.y[j]) };
                Complex64::new(sol.var_value(self.x[j]), im)
            })
            .collect()
    }

    fn values(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut p = self.r.to_vec();
        for (cj, qj) in c.iter().zip(self.q) {
            for (pk, qk) in p.iter_mut().zip(qj) {
                *pk += cj * qk;
            }
        }
        p
    }
}

fn solver_err(e: impl std::fmt::Debug) -> LpError {
    LpError::Solver(format!("{e:?}"))
}

fn add_cut(sol: Solution, lp: &Lp<'_>, k: usize, w: Complex64) -> Result<Solution, LpError> {
    let (e, rhs) = lp.row(k, w);
    sol.add_constraint(e, ComparisonOp::Le, rhs)
        .map_err(solver_err)?
        .into_solution()
        .map_err(|_| LpError::Solver("interrupted".into()))
}

/// Solve the discrete minimax for `target + Σ_j c_j free[j]` over the
/// samples (each column holds the values at the same sample list).
pub fn minimax(target: &[Complex64], free: &[Vec<Complex64>], opts: &MinimaxOptions) -> Result<MinimaxSolution, LpError> {
    let n = target.len();
    if n == 0 {
        return Err(LpError::NoSamples);
    }
    for (col, f) in free.iter().enumerate() {
        if f.len() != n {
            return Err(LpError::Shape { col, expected: n, found: f.len() });
        }
    }
    let all = || target.iter().chain(free.iter().flatten());
    if all().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LpError::NonFinite);
    }
    let scale = all().map(|z| z.norm()).fold(0.0, f64::max);
    let real = all().all(|z| z.im.abs() <= REAL_TOL * scale.max(1.0));

    let basis = orthonormalize(free, real);
    let g: Vec<Complex64> = basis
        .q
        .iter()
        .map(|qj| {
            let mut c = dot(qj, target);
            if real {
                c.im = 0.0;
            }
            c
        })
        .collect();
    let mut r = target.to_vec();
    for (gj, qj) in g.iter().zip(&basis.q) {
        for (rk, qk) in r.iter_mut().zip(qj) {
            *rk -= gj * qk;
        }
    }
    let s = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let finish = |c: Vec<Complex64>, value: f64, lower: f64, rounds: usize, constraints: usize, phases: usize| {
        let shifted: Vec<Complex64> = c.iter().zip(&g).map(|(cj, gj)| cj * s - gj).collect();
        MinimaxSolution {
            value,
            lower,
            coeffs: basis.back_substitute(shifted, free.len()),
            real,
            phases,
            rounds,
            constraints,
            rank: basis.q.len(),
        }
    };
    let q = if real { 2 } else { opts.phases.max(3) };
    if s == 0.0 || basis.q.is_empty() {
        let c = vec![Complex64::new(0.0, 0.0); basis.q.len()];
        return Ok(finish(c, s, s, 0, 0, q));
    }
    let rr: Vec<Complex64> = r.iter().map(|z| z / s).collect();

    let bound = 2.0 * (n as f64).sqrt();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let u = problem.add_var(1.0, (0.0, f64::INFINITY));
    let x: Vec<Variable> = basis.q.iter().map(|_| problem.add_var(0.0, (-bound, bound))).collect();
    let y: Vec<Variable> = if real {
        Vec::new()
    } else {
        basis.q.iter().map(|_| problem.add_var(0.0, (-bound, bound))).collect()
    };
    let lp = Lp { q: &basis.q, r: &rr, real, u, x, y };

    // start from the largest residuals; the cut loop adds the rest on demand
    let nvars = lp.x.len() + lp.y.len() + 1;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rr[b].norm().total_cmp(&rr[a].norm()).then(a.cmp(&b)));
    order.truncate(n.min((4 * nvars).max(64)));
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    for k in order {
        let a = best_phase(rr[k], q);
        used.insert((k, a));
        let (e, rhs) = lp.row(k, phase(a, q));
        problem.add_constraint(e, ComparisonOp::Le, rhs);
    }
    let mut sol = problem
        .solve()
        .map_err(solver_err)?
        .into_solution()
        .map_err(|_| LpError::Solver("interrupted".into()))?;

    // best attained sup norm so far; later LP iterates may be worse
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let mut keep = |c: &[Complex64], p: &[Complex64]| {
        let v = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, c.to_vec()));
        }
    };
    let mut rounds = 0;
    let batch = opts.cut_batch.max(nvars);
    // grid phases
    loop {
        rounds += 1;
        let c = lp.coeffs(&sol);
        let p = lp.values(&c);
        keep(&c, &p);
        let ub = sol.objective();
        let mut viol: Vec<(f64, usize, usize)> = Vec::new();
        for (k, pk) in p.iter().enumerate() {
            let a = best_phase(*pk, q);
            let v = (phase(a, q) * pk).re - ub;
            if v > opts.tol * ub.max(1.0) && !used.contains(&(k, a)) {
                viol.push((v, k, a));
            }
        }
        if viol.is_empty() || rounds >= opts.max_rounds {
            break;
        }
        viol.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, k, a) in viol.iter().take(batch) {
            used.insert((k, a));
            sol = add_cut(sol, &lp, k, phase(a, q))?;
        }
    }
    // exact-phase refinement (complex problems only)
    let mut extra = 0;
    if !real {
        for _ in 0..opts.refine_rounds {
            let c = lp.coeffs(&sol);
            let p = lp.values(&c);
            keep(&c, &p);
            let ub = sol.objective();
            let mut viol: Vec<(f64, usize)> = p
                .iter()
                .enumerate()
                .map(|(k, pk)| (pk.norm() - ub, k))
                .filter(|(v, _)| *v > opts.tol * ub.max(1.0))
                .collect();
            if viol.is_empty() {
                break;
            }
            rounds += 1;
            viol.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            for &(_, k) in viol.iter().take(batch) {
                let w = p[k].conj() / p[k].norm();
                sol = add_cut(sol, &lp, k, w)?;
                extra += 1;
            }
        }
    }
    let c = lp.coeffs(&sol);
    let p = lp.values(&c);
    keep(&c, &p);
    let (best_value, c) = best.expect("at least one iterate");
    let value = best_value * s;
    let lower = sol.objective() * s;
    Ok(finish(c, value, lower.min(value), rounds, used.len() + extra, q))
}

/// `max_k |target_k + Σ_j c_j free[j]_k|`.
pub fn sup_norm(target: &[Complex64], free: &[Vec<Complex64>], coeffs: &[Complex64]) -> f64 {
    (0..target.len())
        .map(|k| {
            let mut v = target[k];
            for (c, f) in coeffs.iter().zip(free) {
                v += c * f[k];
            }
            v.norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(n: usize) -> Vec<Complex64> {
        (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect()
    }

    fn monomial_cols(z: &[Complex64], k: usize) -> Vec<Vec<Complex64>> {
        (0..k).map(|e| z.iter().map(|x| x.powu(e as u32)).collect()).collect()
    }

    #[test]
    fn no_free_columns() {
        let t = vec![c(1.0, 0.0); 5];
        let s = minimax(&t, &[], &MinimaxOptions::default()).unwrap();
        assert_eq!(s.value, 1.0);
        assert!(s.coeffs.is_empty());
    }

    #[test]
    fn monic_on_circle_is_one() {
        let z = circle(128);
        let t: Vec<Complex64> = z.iter().map(|x| x.powu(3)).collect();
        let s = minimax(&t, &monomial_cols(&z, 3), &MinimaxOptions::default()).unwrap();
        assert!(!s.real);
        assert!((s.value - 1.0).abs() < 1e-6, "{}", s.value);
        assert!(s.lower <= s.value + 1e-12);
    }

    #[test]
    fn chebyshev_on_interval() {
        // 840 nodes spacing: every extremum of T_k, k ≤ 8, is a node
        let n = 841;
        let z: Vec<Complex64> = (0..n).map(|k| c((PI * k as f64 / (n - 1) as f64).cos(), 0.0)).collect();
        for k in 1..=8usize {
            let t: Vec<Complex64> = z.iter().map(|x| x.powu(k as u32)).collect();
            let s = minimax(&t, &monomial_cols(&z, k), &MinimaxOptions::default()).unwrap();
            assert!(s.real);
            let want = 2f64.powi(1 - k as i32);
            assert!((s.value / want - 1.0).abs() < 1e-6, "k={k} {}", s.value);
            assert!((sup_norm(&t, &monomial_cols(&z, k), &s.coeffs) - s.value).abs() < 1e-8);
        }
    }

    #[test]
    fn phase_grid_is_within_secant_factor() {
        let z = circle(64);
        let t: Vec<Complex64> = z.iter().map(|x| x.powu(2) + c(0.3, 0.1) * x).collect();
        let cols = monomial_cols(&z, 1);
        let coarse = MinimaxOptions { phases: 8, refine_rounds: 0, ..MinimaxOptions::default() };
        let a = minimax(&t, &cols, &coarse).unwrap();
        let b = minimax(&t, &cols, &MinimaxOptions::default()).unwrap();
        assert!(a.lower <= b.value * (1.0 + 1e-9));
        assert!(a.value <= b.value / (PI / 8.0).cos() * (1.0 + 1e-9));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn invariant_under_permutation_and_rotation(seed in 0u64..1000, rot in 0.0f64..6.28) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let z: Vec<Complex64> = (0..40).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let t: Vec<Complex64> = z.iter().map(|x| x.powu(2)).collect();
            let cols = monomial_cols(&z, 2);
            let base = minimax(&t, &cols, &MinimaxOptions::default()).unwrap();
            let mut perm: Vec<usize> = (0..z.len()).collect();
            perm.reverse();
            let w = Complex64::from_polar(1.0, rot);
            let t2: Vec<Complex64> = perm.iter().map(|&k| t[k] * w).collect();
            let cols2: Vec<Vec<Complex64>> = cols.iter().map(|col| perm.iter().map(|&k| col[k] * w).collect()).collect();
            let other = minimax(&t2, &cols2, &MinimaxOptions::default()).unwrap();
            // both are within the refinement gap of the same discrete minimax
            let gap = base.value.max(other.value) - base.lower.min(other.lower);
            prop_assert!((base.value - other.value).abs() <= gap + 1e-9);
            prop_assert!(gap <= 1e-2 * base.value);
        }

        #[test]
        fn adding_samples_never_decreases(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let z: Vec<Complex64> = (0..30).map(|_| c(rng.gen_range(-1.0..1.0), 0.0)).collect();
            let t: Vec<Complex64> = z.iter().map(|x| x.powu(3)).collect();
            let small = minimax(&t[..15], &monomial_cols(&z[..15], 3), &MinimaxOptions::default()).unwrap();
            let big = minimax(&t, &monomial_cols(&z, 3), &MinimaxOptions::default()).unwrap();
            prop_assert!(big.value >= small.value * (1.0 - 1e-9));
        }
    }
}
