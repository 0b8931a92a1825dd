//! Log-Vandermonde determinants, Fekete point search over a candidate set,
//! the diameter series `d_s`, and the comparisons built on them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chebyshev::{ChebyshevTable, PrincipalEstimate};
use crate::idealcore::GroebnerContext;
use crate::infinitybasis::{OrderedBasisC, VarietyBundle};
use crate::linalg::{determinant, log_abs_det};
use crate::numeric::BasisValues;
use crate::polycore::{GaussRational, MultiIndex, Polynomial, Scalar};

type Q = GaussRational;

/// Smallest accepted log-improvement of an exchange step.
pub const EXCHANGE_TOL: f64 = 1e-12;
/// Relative norm below which a column counts as dependent on the candidates.
const DEPENDENCE_TOL: f64 = 1e-12;
/// Minor enumeration switches to sampling above this many subsets.
const MINOR_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeketeError {
    #[error("{candidates} candidates cannot carry {m} points")]
    TooFewCandidates { m: usize, candidates: usize },
    #[error("basis prefix has {have} columns, {need} needed")]
    Prefix { need: usize, have: usize },
    #[error("every candidate makes the configuration singular at size {step}")]
    Singular { step: usize },
    #[error("non-finite basis value")]
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// The ordered basis `𝒞`.
    Ordered,
    /// Standard monomials in graded order.
    Standard,
}

/// `log|det(e_j(ζ_i))|` with the basis and prefix length it refers to.
#[derive(Clone, Debug, PartialEq)]
pub struct LogVdm {
    /// `-∞` for a singular configuration.
    pub log_abs: f64,
    pub basis: BasisKind,
    pub m: usize,
}

/// Log-Vandermonde of the first `config.len()` columns at the given candidates.
pub fn log_vandermonde(values: &BasisValues, config: &[usize], basis: BasisKind) -> Result<LogVdm, FeketeError> {
    let m = config.len();
    if m > values.ncols() {
        return Err(FeketeError::Prefix { need: m, have: values.ncols() });
    }
    let a = values.square(config);
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(FeketeError::NonFinite);
    }
    Ok(LogVdm { log_abs: log_abs_det(a, m), basis, m })
}

/// Log-Vandermonde of `polys` at `points` (one point per row).
pub fn log_vandermonde_at(polys: &[Polynomial<Complex64>], points: &[Vec<Complex64>], basis: BasisKind) -> Result<LogVdm, FeketeError> {
    if polys.len() != points.len() {
        return Err(FeketeError::Prefix { need: points.len(), have: polys.len() });
    }
    let values = BasisValues::new(polys, points);
    let config: Vec<usize> = (0..points.len()).collect();
    log_vandermonde(&values, &config, basis)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchTrace {
    pub greedy_steps: usize,
    pub sweeps: usize,
    /// Log gains of accepted exchanges, in order.
    pub improvements: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeketeResult {
    /// Candidate indices, in the order the rows were filled.
    pub points: Vec<usize>,
    pub log_vdm: LogVdm,
    pub trace: SearchTrace,
}

/// Incremental Fekete search. Columns are orthonormalized over the candidate
/// set (`E = Q·R` with `R` upper triangular), so `log|Van_E| = log|Van_Q| +
/// Σ log|R_kk|` and all scoring happens in the well-conditioned `Q`.
pub struct FeketeSearch<'a> {
    values: &'a BasisValues,
    basis: BasisKind,
    sweeps: usize,
    q: Vec<Vec<Complex64>>,
    log_r: Vec<f64>,
    config: Vec<usize>,
    /// `W = Q[:, ..M]·Q[config, ..M]^{-1}`, stored per candidate.
    w: Vec<Vec<Complex64>>,
    trace: SearchTrace,
    /// `log V_j` for `j = 0..=M`.
    history: Vec<f64>,
    seed: u64,
}

impl<'a> FeketeSearch<'a> {
    pub fn new(values: &'a BasisValues, basis: BasisKind, seed: u64, sweeps: usize) -> Self {
        Self {
            values,
            basis,
            sweeps,
            q: Vec::new(),
            log_r: Vec::new(),
            config: Vec::new(),
            w: vec![Vec::new(); values.npoints()],
            trace: SearchTrace::default(),
            history: vec![0.0],
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.config.len()
    }

    pub fn is_empty(&self) -> bool {
        self.config.is_empty()
    }

    pub fn config(&self) -> &[usize] {
        &self.config
    }

    /// `log V_j` for every prefix length reached so far, `V_0 = 1`.
    pub fn history(&self) -> &[f64] {
        &self.history
    }

    fn push_column(&mut self) -> Result<(), FeketeError> {
        let j = self.q.len();
        let mut v = self.values.col(j).to_vec();
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FeketeError::NonFinite);
        }
        let orig = norm(&v);
        for _ in 0..2 {
            for qk in &self.q {
                let c: Complex64 = qk.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(qk) {
                    *x -= c * y;
                }
            }
        }
        let r = norm(&v);
        if !(r > DEPENDENCE_TOL * orig.max(f64::MIN_POSITIVE)) {
            return Err(FeketeError::Singular { step: j + 1 });
        }
        for x in &mut v {
            *x /= r;
        }
        self.q.push(v);
        self.log_r.push(r.ln());
        Ok(())
    }

    /// Recompute `W` from the current configuration.
    fn refresh_w(&mut self) -> Result<(), FeketeError> {
        let m = self.config.len();
        let a = DMatrix::from_fn(m, m, |r, c| self.q[c][self.config[r]]);
        let inv = a.try_inverse().ok_or(FeketeError::Singular { step: m })?;
        for (k, row) in self.w.iter_mut().enumerate() {
            row.clear();
            for c in 0..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    acc += self.q[r][k] * inv[(r, c)];
                }
                row.push(acc);
            }
        }
        Ok(())
    }

    fn exact_log(&self) -> f64 {
        let m = self.config.len();
        let a: Vec<Complex64> = self.config.iter().flat_map(|&k| (0..m).map(move |j| (j, k))).map(|(j, k)| self.q[j][k]).collect();
        log_abs_det(a, m) + self.log_r[..m].iter().sum::<f64>()
    }

    /// Add one column and one point (greedy), then run exchange sweeps.
    /// Returns `log V_M` for the new size `M`.
    pub fn extend(&mut self) -> Result<f64, FeketeError> {
        let j = self.config.len();
        let n = self.values.npoints();
        if j + 1 > n {
            return Err(FeketeError::TooFewCandidates { m: j + 1, candidates: n });
        }
        if j + 1 > self.values.ncols() {
            return Err(FeketeError::Prefix { need: j + 1, have: self.values.ncols() });
        }
        self.push_column()?;
        let qj = &self.q[j];
        let best = if j == 0 {
            (self.seed % n as u64) as usize
        } else {
            let x: Vec<Complex64> = self.config.iter().map(|&k| qj[k]).collect();
            let mut best = (0usize, -1.0f64);
            for k in 0..n {
                let proj: Complex64 = self.w[k].iter().zip(&x).map(|(a, b)| a * b).sum();
                let score = (qj[k] - proj).norm();
                if score > best.1 {
                    best = (k, score);
                }
            }
            if !(best.1 > DEPENDENCE_TOL) {
                return Err(FeketeError::Singular { step: j + 1 });
            }
            best.0
        };
        self.config.push(best);
        self.trace.greedy_steps += 1;
        self.refresh_w()?;
        self.exchange();
        let v = self.exact_log();
        self.history.push(v);
        Ok(v)
    }

    fn exchange(&mut self) {
        let m = self.config.len();
        for _ in 0..self.sweeps {
            self.trace.sweeps += 1;
            let mut improved = false;
            for p in 0..m {
                let mut best = (0usize, 0.0f64);
                for (k, row) in self.w.iter().enumerate() {
                    let v = row[p].norm();
                    if v > best.1 {
                        best = (k, v);
                    }
                }
                let gain = best.1.ln();
                if gain > EXCHANGE_TOL {
                    self.swap(p, best.0);
                    self.trace.improvements.push(gain);
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
    }

    /// Replace row `p` by candidate `c`: `W ← W − W[:,p](W_c − e_p)/W_c[p]`.
    fn swap(&mut self, p: usize, c: usize) {
        let wc = self.w[c].clone();
        let piv = wc[p];
        for row in &mut self.w {
            let f = row[p] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for (q, x) in row.iter_mut().enumerate() {
                let e = if q == p { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                *x -= f * (wc[q] - e);
            }
        }
        self.config[p] = c;
    }

    pub fn result(&self) -> FeketeResult {
        FeketeResult {
            points: self.config.clone(),
            log_vdm: LogVdm { log_abs: *self.history.last().expect("V_0"), basis: self.basis, m: self.config.len() },
            trace: self.trace.clone(),
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Greedy build to `m` points followed by exchange sweeps at every size.
pub fn fekete_search(values: &BasisValues, basis: BasisKind, m: usize, seed: u64, sweeps: usize) -> Result<FeketeResult, FeketeError> {
    if values.npoints() < m {
        return Err(FeketeError::TooFewCandidates { m, candidates: values.npoints() });
    }
    let mut search = FeketeSearch::new(values, basis, seed, sweeps);
    while search.len() < m {
        search.extend()?;
    }
    Ok(search.result())
}

/// Standard monomials of degree at most `s`, graded ascending.
pub fn standard_basis_polys(ctx: &GroebnerContext, s: u32) -> Vec<Polynomial<Complex64>> {
    ctx.standard_monomials(s)
        .into_iter()
        .map(|mi| Polynomial::monomial(mi, Complex64::new(1.0, 0.0)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiameterRow {
    pub s: u32,
    pub h_s: usize,
    pub m_s: usize,
    pub l_s: usize,
    pub log_v: f64,
    pub d_s: f64,
    pub log_w: Option<f64>,
    pub d_s_std: Option<f64>,
    /// V-optimal configuration at `M = m_s` (empty if the search stopped).
    pub config: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiameterSeries {
    pub rows: Vec<DiameterRow>,
    /// `log V_j` for `j = 0..=m_{s_max}`, `-∞` past a singular step.
    pub prefix_log_v: Vec<f64>,
    pub candidates: usize,
    pub trace: SearchTrace,
    /// Set when the search stopped early.
    pub stopped: Option<FeketeError>,
}

impl DiameterSeries {
    pub fn row(&self, s: u32) -> Option<&DiameterRow> {
        self.rows.iter().find(|r| r.s == s)
    }
}

fn run_prefix(values: &BasisValues, basis: BasisKind, total: usize, seed: u64, sweeps: usize, mut at: impl FnMut(usize, &[usize])) -> (Vec<f64>, SearchTrace, Option<FeketeError>) {
    let mut search = FeketeSearch::new(values, basis, seed, sweeps);
    let mut stopped = None;
    while search.len() < total {
        if let Err(e) = search.extend() {
            stopped = Some(e);
            break;
        }
        at(search.len(), search.config());
    }
    let mut hist = search.history().to_vec();
    hist.resize(total + 1, f64::NEG_INFINITY);
    (hist, search.result().trace, stopped)
}

/// `d_s = V_{m_s}^{1/l_s}` for `1 ≤ s ≤ s_max`, warm-started across `s`.
/// With `std_values`, the same search in the standard-monomial basis gives `W`.
pub fn diameter_series(
    basis: &OrderedBasisC,
    values: &BasisValues,
    std_values: Option<&BasisValues>,
    s_max: u32,
    seed: u64,
    sweeps: usize,
) -> DiameterSeries {
    let total = basis.m_s(s_max);
    let sizes: Vec<usize> = (0..=s_max).map(|s| basis.m_s(s)).collect();
    let mut configs = vec![Vec::new(); s_max as usize + 1];
    let (prefix_log_v, trace, stopped) = run_prefix(values, BasisKind::Ordered, total, seed, sweeps, |len, cfg| {
        for (s, &ms) in sizes.iter().enumerate() {
            if ms == len {
                configs[s] = cfg.to_vec();
            }
        }
    });
    let log_w = std_values.map(|sv| run_prefix(sv, BasisKind::Standard, total, seed, sweeps, |_, _| {}).0);
    let rows = (1..=s_max)
        .map(|s| {
            let m_s = basis.m_s(s);
            let l_s = basis.l_s(s);
            let log_v = prefix_log_v[m_s];
            let lw = log_w.as_ref().map(|w| w[m_s]);
            DiameterRow {
                s,
                h_s: basis.h[s as usize],
                m_s,
                l_s,
                log_v,
                d_s: diameter(log_v, l_s),
                log_w: lw,
                d_s_std: lw.map(|w| diameter(w, l_s)),
                config: std::mem::take(&mut configs[s as usize]),
            }
        })
        .collect();
    DiameterSeries { rows, prefix_log_v, candidates: values.npoints(), trace, stopped }
}

fn diameter(log_v: f64, l_s: usize) -> f64 {
    if l_s == 0 {
        return 1.0;
    }
    (log_v / l_s as f64).exp()
}

/// One-step check `Y(e_j) ≤ V_{j+1}/V_j ≤ (j+1)·Y(e_j)` for element `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SandwichRow {
    pub element: usize,
    pub degree: u32,
    pub star: bool,
    pub y: f64,
    /// `log(V_{j+1}/V_j)`; `None` when `V_j = 0`.
    pub log_ratio: Option<f64>,
    /// `log ratio − log Y`.
    pub lower_margin: f64,
    /// `log((j+1)Y) − log ratio`.
    pub upper_margin: f64,
    pub pass: bool,
}

/// Degree-`s` block in log form: the per-element lower sum, the paper-form
/// lower bound with `T̃_s`, the Vandermonde increment and the upper bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockRow {
    pub s: u32,
    pub a_s: i64,
    /// `Σ_{j in block} log Y(e_j)`.
    pub lower_elements: f64,
    /// `s a_s log T̃_s + Σ_{|α|=s−t,i} log Y_i(α)`; `None` without tilde data.
    pub lower_tilde: Option<f64>,
    pub middle: f64,
    /// `2 log(m_s!/m_{s−1}!) + s a_s log r + Σ log Y_i(α)`.
    pub upper: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SandwichReport {
    pub slack: f64,
    pub rows: Vec<SandwichRow>,
    pub blocks: Vec<BlockRow>,
    pub skipped: usize,
}

impl SandwichReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.blocks.iter().all(|b| b.pass)
    }

    /// Smallest margin over the one-step rows (negative means slack was used).
    pub fn worst_margin(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.log_ratio.is_some())
            .map(|r| r.lower_margin.min(r.upper_margin))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `y[j]` is the minimax value of element `j`; `tables` are the `Y_i`
/// tables (for the block products) and `tilde` the `Ỹ` table.
pub fn sandwich_check(
    basis: &OrderedBasisC,
    series: &DiameterSeries,
    y: &[f64],
    tables: &[ChebyshevTable],
    tilde: Option<&ChebyshevTable>,
    r: f64,
    slack: f64,
) -> SandwichReport {
    let tol = (1.0 + slack).ln();
    let n = y.len().min(series.prefix_log_v.len() - 1);
    let mut rows = Vec::new();
    let mut skipped = 0;
    for j in 0..n {
        let e = &basis.elements[j];
        let (prev, next) = (series.prefix_log_v[j], series.prefix_log_v[j + 1]);
        let ly = y[j].ln();
        let log_ratio = (prev.is_finite() && next.is_finite()).then_some(next - prev);
        let (lower_margin, upper_margin, pass) = match log_ratio {
            Some(lr) => {
                let lo = lr - ly;
                let hi = ((j + 1) as f64).ln() + ly - lr;
                (lo, hi, lo >= -tol && hi >= -tol)
            }
            None => {
                skipped += 1;
                (f64::NAN, f64::NAN, true)
            }
        };
        rows.push(SandwichRow { element: j, degree: e.degree, star: e.is_star(), y: y[j], log_ratio, lower_margin, upper_margin, pass });
    }
    let mut blocks = Vec::new();
    for s in 1..=basis.s_max {
        let (lo_idx, hi_idx) = (basis.m_s(s - 1), basis.m_s(s));
        if hi_idx > n || !series.prefix_log_v[lo_idx].is_finite() || !series.prefix_log_v[hi_idx].is_finite() {
            continue;
        }
        let middle = series.prefix_log_v[hi_idx] - series.prefix_log_v[lo_idx];
        let lower_elements: f64 = (lo_idx..hi_idx).map(|j| y[j].ln()).sum();
        let a_s = basis.a_s(s);
        let module_sum = if s >= basis.t {
            let k = s - basis.t;
            let mut acc = Some(0.0);
            for table in tables {
                for a in MultiIndex::of_degree(basis.m, k) {
                    acc = match (acc, table.value(&a)) {
                        (Some(x), Some(v)) => Some(x + v.ln()),
                        _ => None,
                    };
                }
            }
            if tables.len() == basis.d { acc } else { None }
        } else {
            Some(0.0)
        };
        let Some(module_sum) = module_sum else { continue };
        let t_s = tilde.and_then(|tt| {
            let lo = s.saturating_sub(basis.t);
            tt.entries
                .iter()
                .filter(|(a, e)| a.degree() >= lo && a.degree() <= s && e.degree > 0)
                .map(|(_, e)| e.value.powf(1.0 / e.degree as f64))
                .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |v| v.min(x))))
        });
        let sa = (s as i64 * a_s) as f64;
        let lower_tilde = if a_s == 0 { Some(module_sum) } else { t_s.map(|ts| sa * ts.ln() + module_sum) };
        let fact: f64 = (lo_idx + 1..=hi_idx).map(|k| (k as f64).ln()).sum();
        let upper = 2.0 * fact + sa * r.ln() + module_sum;
        let pass = lower_elements <= middle + tol * (hi_idx - lo_idx) as f64
            && lower_tilde.is_none_or(|l| l <= middle + tol * (hi_idx - lo_idx) as f64)
            && middle <= upper + tol * (hi_idx - lo_idx) as f64;
        blocks.push(BlockRow { s, a_s, lower_elements, lower_tilde, middle, upper, pass });
    }
    SandwichReport { slack, rows, blocks, skipped }
}

/// Coefficient matrix `A_{iβ}` of `bv_i` on `z_m^{t−|β|} z^β`, `|β| ≤ t`,
/// with `β` over `z_{m+1}..z_n`.
pub fn bv_coefficient_matrix(bundle: &VarietyBundle) -> (Vec<Vec<Q>>, Vec<Vec<u32>>) {
    let (n, m, t) = (bundle.n(), bundle.m, bundle.t);
    let betas: Vec<Vec<u32>> = MultiIndex::up_to_degree(n - m, t).into_iter().map(|b| b.exps().to_vec()).collect();
    let rows = (0..bundle.d)
        .map(|i| {
            betas
                .iter()
                .map(|b| {
                    let mut e = vec![0u32; n];
                    e[m - 1] = t - b.iter().sum::<u32>();
                    e[m..].copy_from_slice(b);
                    bundle.bv(i).coeff(&MultiIndex::new(e))
                })
                .collect()
        })
        .collect();
    (rows, betas)
}

/// `(c, C)`: smallest and largest `|det|` over nonsingular square minors.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorBounds {
    pub c: f64,
    pub big_c: f64,
    pub minors: Vec<f64>,
    /// Set when the enumeration was replaced by random sampling.
    pub sampled: bool,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn binom(n: usize, k: usize) -> usize {
    crate::polycore::binomial(n as u64, k as u64) as usize
}

pub fn minor_bounds(a: &[Vec<Q>], seed: u64) -> Option<MinorBounds> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let kmax = rows.min(cols);
    let total: usize = (1..=kmax).map(|k| binom(rows, k).saturating_mul(binom(cols, k))).fold(0usize, usize::saturating_add);
    let sampled = total > MINOR_CAP;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut minors = Vec::new();
    let mut push = |ri: &[usize], ci: &[usize]| {
        let sub: Vec<Vec<Q>> = ri.iter().map(|&r| ci.iter().map(|&c| a[r][c].clone()).collect()).collect();
        let det = determinant(&sub);
        if !det.is_zero() {
            minors.push(det.to_c64().norm());
        }
    };
    for k in 1..=kmax {
        if sampled {
            for _ in 0..MINOR_CAP / kmax {
                let mut ri = sample(&mut rng, rows, k).into_vec();
                let mut ci = sample(&mut rng, cols, k).into_vec();
                ri.sort_unstable();
                ci.sort_unstable();
                push(&ri, &ci);
            }
        } else {
            for ri in subsets(rows, k) {
                for ci in subsets(cols, k) {
                    push(&ri, &ci);
                }
            }
        }
    }
    let c = minors.iter().copied().fold(f64::INFINITY, f64::min);
    let big_c = minors.iter().copied().fold(0.0, f64::max);
    (!minors.is_empty()).then_some(MinorBounds { c, big_c, minors, sampled })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub tau: u32,
    pub b_tau: usize,
    /// `log|Van_𝒞| − log|Van|` at the V-optimal configuration.
    pub diff: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StdRatioReport {
    /// Whether every defining product of `𝒞` was already a normal form.
    pub normal_form_products: bool,
    pub a: Vec<Vec<Q>>,
    pub minors: Option<MinorBounds>,
    pub rows: Vec<RatioRow>,
    /// `|d_s(V) − d_s(W)|/d_s(W)` at the top degree of the series.
    pub top_gap: Option<f64>,
    /// Variance of `log|Van_𝒞| − log|Van|` over random configurations.
    pub variance: f64,
    pub configurations: usize,
}

fn log_diff(values: &BasisValues, std_values: &BasisValues, config: &[usize]) -> Option<f64> {
    let a = log_vandermonde(values, config, BasisKind::Ordered).ok()?.log_abs;
    let b = log_vandermonde(std_values, config, BasisKind::Standard).ok()?.log_abs;
    (a.is_finite() && b.is_finite()).then_some(a - b)
}

/// Compares the `𝒞` and standard-monomial Vandermondes: the minor bound per
/// degree, the top-degree diameter gap, and constancy of the ratio over
/// `configs` random configurations of size `m_{s_max}`.
pub fn std_basis_ratio(
    basis: &OrderedBasisC,
    bundle: &VarietyBundle,
    series: &DiameterSeries,
    values: &BasisValues,
    std_values: &BasisValues,
    configs: usize,
    seed: u64,
) -> StdRatioReport {
    let normal_form_products = basis.elements.iter().all(|e| e.raw_is_normal_form);
    let (a, _) = bv_coefficient_matrix(bundle);
    let minors = minor_bounds(&a, seed);
    let log_bound = minors.as_ref().map_or(0.0, |mb| mb.c.ln().abs().max(mb.big_c.ln().abs()));
    let rows = series
        .rows
        .iter()
        .filter(|r| !r.config.is_empty())
        .filter_map(|r| {
            let diff = log_diff(values, std_values, &r.config)?;
            let b_tau = if r.s >= basis.t { basis.b_tau(r.s) } else { 0 };
            let bound = b_tau as f64 * log_bound;
            Some(RatioRow { tau: r.s, b_tau, diff, bound, holds: diff.abs() <= bound * (1.0 + 1e-9) + 1e-9 })
        })
        .collect();
    let top_gap = series.rows.last().and_then(|r| r.d_s_std.map(|w| (r.d_s - w).abs() / w));
    let size = series.rows.last().map_or(0, |r| r.m_s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut diffs = Vec::new();
    if size > 0 && size <= values.npoints() {
        for _ in 0..configs {
            let cfg = sample(&mut rng, values.npoints(), size).into_vec();
            if let Some(d) = log_diff(values, std_values, &cfg) {
                diffs.push(d);
            }
        }
    }
    let mean = diffs.iter().sum::<f64>() / diffs.len().max(1) as f64;
    let variance = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / diffs.len().max(1) as f64;
    StdRatioReport { normal_form_products, a, minors, rows, top_gap, variance, configurations: diffs.len() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductRow {
    pub s: u32,
    pub log_d: f64,
    /// `(1/d) Σ_i log T̂(K, λ_i)` at level `s − t`.
    pub log_t: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductReport {
    pub rows: Vec<ProductRow>,
    /// `d(K) = 0` on at least one side.
    pub degenerate: bool,
}

impl ProductReport {
    pub fn last(&self) -> Option<&ProductRow> {
        self.rows.last()
    }

    /// Whether `Δ` is non-increasing over the last `k` rows.
    pub fn non_increasing_tail(&self, k: usize) -> bool {
        let tail = &self.rows[self.rows.len().saturating_sub(k)..];
        tail.windows(2).all(|w| w[1].delta <= w[0].delta + 1e-12)
    }
}

/// `Δ(s) = |log d_s − (1/d) Σ_i log T̂(K,λ_i)|`, with `T̂` read off the
/// principal-constant series at level `s − t`.
pub fn product_formula_compare(series: &DiameterSeries, principal: &[PrincipalEstimate], t: u32) -> ProductReport {
    let mut degenerate = principal.iter().any(|p| p.value == 0.0);
    let mut rows = Vec::new();
    for r in &series.rows {
        if r.s <= t {
            continue;
        }
        let level = r.s - t;
        let logs: Option<Vec<f64>> = principal.iter().map(|p| p.series.iter().find(|(l, _)| *l == level).map(|x| x.1)).collect();
        let Some(logs) = logs else { continue };
        let log_t = logs.iter().sum::<f64>() / logs.len().max(1) as f64;
        if !r.log_v.is_finite() || !log_t.is_finite() {
            degenerate = true;
            continue;
        }
        let log_d = r.d_s.ln();
        rows.push(ProductRow { s: r.s, log_d, log_t, delta: (log_d - log_t).abs() });
    }
    ProductReport { rows, degenerate }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infinitybasis::{build_basis, BundleOptions, VarietySpec};
    use crate::polycore::parse_polynomial;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn line_polys(k: u32) -> Vec<Polynomial<Complex64>> {
        (0..=k).map(|e| Polynomial::monomial(MultiIndex::new(vec![e, 0]), c(1.0, 0.0))).collect()
    }

    fn circle(n: usize) -> Vec<Vec<Complex64>> {
        (0..n).map(|k| vec![Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64), c(0.0, 0.0)]).collect()
    }

    fn interval(n: usize) -> Vec<Vec<Complex64>> {
        (0..n).map(|k| vec![c((PI * k as f64 / (n - 1) as f64).cos(), 0.0), c(0.0, 0.0)]).collect()
    }

    fn bundle(n: usize, m: usize, gens: &[&str]) -> VarietyBundle {
        let spec = VarietySpec {
            n,
            m,
            generators: gens.iter().map(|g| parse_polynomial(g, n).unwrap()).collect(),
            radical_asserted: false,
            points_at_infinity: None,
        };
        VarietyBundle::prepare(&spec, &BundleOptions::default()).unwrap()
    }

    #[test]
    fn small_vandermondes() {
        let p = line_polys(1);
        let one = log_vandermonde_at(&p[..1], &[vec![c(0.3, 2.0), c(0.0, 0.0)]], BasisKind::Ordered).unwrap();
        assert_eq!(one.log_abs, 0.0);
        let (a, b) = (c(0.3, -0.2), c(-1.1, 0.7));
        let two = log_vandermonde_at(&p, &[vec![a, c(0.0, 0.0)], vec![b, c(0.0, 0.0)]], BasisKind::Ordered).unwrap();
        assert!((two.log_abs - (b - a).norm().ln()).abs() < 1e-14);
        let rep = log_vandermonde_at(&p, &[vec![a, c(0.0, 0.0)], vec![a, c(0.0, 0.0)]], BasisKind::Ordered).unwrap();
        assert_eq!(rep.log_abs, f64::NEG_INFINITY);
    }

    #[test]
    fn column_scaling_shifts_log() {
        let pts: Vec<Vec<Complex64>> = (0..5).map(|k| vec![c(0.2 * k as f64 - 0.3, 0.1 * k as f64), c(0.0, 0.0)]).collect();
        let p = line_polys(4);
        let base = log_vandermonde_at(&p, &pts, BasisKind::Ordered).unwrap().log_abs;
        let mut scaled = p.clone();
        scaled[2] = scaled[2].scale(&c(1e3, 0.0));
        scaled[4] = scaled[4].scale(&c(1e-2, 0.0));
        let got = log_vandermonde_at(&scaled, &pts, BasisKind::Ordered).unwrap().log_abs;
        assert!((got - base - 10f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn circle_three_points() {
        let vals = BasisValues::new(&line_polys(2), &circle(720));
        let r = fekete_search(&vals, BasisKind::Ordered, 3, 0, 50).unwrap();
        assert!(r.log_vdm.log_abs >= (3.0 * 3f64.sqrt()).ln() - 1e-6, "{r:?}");
        let again = fekete_search(&vals, BasisKind::Ordered, 3, 0, 50).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn interval_endpoints() {
        let vals = BasisValues::new(&line_polys(1), &interval(101));
        let r = fekete_search(&vals, BasisKind::Ordered, 2, 17, 2).unwrap();
        let mut pts = r.points.clone();
        pts.sort_unstable();
        assert_eq!(pts, vec![0, 100]);
        assert!((r.log_vdm.log_abs - 2f64.ln()).abs() < 1e-12);
        let one = fekete_search(&vals, BasisKind::Ordered, 1, 5, 2).unwrap();
        assert_eq!(one.log_vdm.log_abs, 0.0);
    }

    #[test]
    fn repeated_candidates_are_singular() {
        let pts = vec![vec![c(0.5, 0.0), c(0.0, 0.0)]; 4];
        let vals = BasisValues::new(&line_polys(2), &pts);
        assert!(matches!(fekete_search(&vals, BasisKind::Ordered, 2, 0, 2), Err(FeketeError::Singular { step: 2 })));
    }

    #[test]
    fn exchange_matches_direct_determinant() {
        let vals = BasisValues::new(&line_polys(7), &interval(200));
        let r = fekete_search(&vals, BasisKind::Ordered, 8, 3, 3).unwrap();
        let direct = log_vandermonde(&vals, &r.points, BasisKind::Ordered).unwrap().log_abs;
        assert!((r.log_vdm.log_abs - direct).abs() < 1e-8);
        assert!(r.trace.improvements.iter().all(|g| *g > 0.0));
    }

    #[test]
    fn circle_series_closed_forms() {
        let b = bundle(2, 1, &["z2"]);
        let basis = build_basis(&b, 6).unwrap();
        let polys: Vec<_> = basis.elements.iter().map(|e| e.float.clone()).collect();
        let vals = BasisValues::new(&polys, &circle(720));
        let series = diameter_series(&basis, &vals, Some(&vals), 6, 0, 200);
        assert!((series.row(1).unwrap().d_s - 2.0).abs() < 1e-6);
        assert!((series.row(2).unwrap().d_s - 3f64.sqrt()).abs() < 1e-6);
        for r in &series.rows {
            let want = ((r.s + 1) as f64).powf(1.0 / r.s as f64);
            // 720 candidates hold the equally spaced optimum only when s+1 divides 720
            let tol = if 720 % (r.s + 1) == 0 { 1e-6 } else { 1e-4 };
            assert!(r.d_s <= want + 1e-9 && want - r.d_s < tol, "{} {} {want}", r.s, r.d_s);
            assert_eq!(r.d_s_std, Some(r.d_s));
        }
    }

    #[test]
    fn sphere_minor_bounds() {
        let b = bundle(3, 2, &["z1^2 + z2^2 + z3^2 - 1"]);
        let (a, betas) = bv_coefficient_matrix(&b);
        assert_eq!(betas, vec![vec![0], vec![1]]);
        let want = [[(1, 2, 0, 1), (0, 1, 1, 2)], [(1, 2, 0, 1), (0, 1, -1, 2)]];
        for (row, w) in a.iter().zip(want) {
            for (x, (p, q, r, s)) in row.iter().zip(w) {
                assert_eq!(*x, Q::from_fracs(p, q, r, s));
            }
        }
        let mb = minor_bounds(&a, 0).unwrap();
        assert!((mb.c - 0.5).abs() < 1e-15 && (mb.big_c - 0.5).abs() < 1e-15);
        assert_eq!(mb.minors.len(), 5);
        assert!(!mb.sampled);
    }

    #[test]
    fn product_formula_degenerate_point() {
        let b = bundle(2, 1, &["z2"]);
        let basis = build_basis(&b, 3).unwrap();
        let polys: Vec<_> = basis.elements.iter().map(|e| e.float.clone()).collect();
        let pts = vec![vec![c(0.5, 0.0), c(0.0, 0.0)]; 6];
        let vals = BasisValues::new(&polys, &pts);
        let series = diameter_series(&basis, &vals, None, 3, 0, 2);
        assert!(series.stopped.is_some());
        assert!(series.rows.iter().all(|r| r.d_s == 0.0));
        let pe = PrincipalEstimate { value: 0.0, series: vec![(1, f64::NEG_INFINITY)], slope: 0.0, zeros: 1 };
        assert!(product_formula_compare(&series, &[pe], 0).degenerate);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn permutation_invariance(pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5), shift in 1usize..5) {
            let p = line_polys(4);
            let pts: Vec<Vec<Complex64>> = pts.into_iter().map(|(x, y)| vec![c(x, y), c(0.0, 0.0)]).collect();
            let mut rot = pts.clone();
            rot.rotate_left(shift);
            let a = log_vandermonde_at(&p, &pts, BasisKind::Ordered).unwrap().log_abs;
            let b = log_vandermonde_at(&p, &rot, BasisKind::Ordered).unwrap().log_abs;
            prop_assert!((a - b).abs() < 1e-9 || (a.is_infinite() && b.is_infinite()));
        }

        #[test]
        fn triangular_change_is_constant(pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4)) {
            // e'_j = e_j + Σ_{k<j} c_jk e_k scaled by s_j changes log|Van| by Σ log|s_j|
            let p = line_polys(3);
            let mut q = p.clone();
            q[2] = &q[2].scale(&c(2.0, 1.0)) + &q[1].scale(&c(0.3, -0.4));
            q[3] = &q[3].scale(&c(0.0, -0.5)) + &q[0].scale(&c(1.5, 0.0));
            let pts: Vec<Vec<Complex64>> = pts.into_iter().map(|(x, y)| vec![c(x, y), c(0.0, 0.0)]).collect();
            let a = log_vandermonde_at(&p, &pts, BasisKind::Ordered).unwrap().log_abs;
            let b = log_vandermonde_at(&q, &pts, BasisKind::Standard).unwrap().log_abs;
            prop_assume!(a.is_finite() && a > -20.0);
            let want = c(2.0, 1.0).norm().ln() + 0.5f64.ln();
            prop_assert!((b - a - want).abs() < 1e-8);
        }
    }
}
