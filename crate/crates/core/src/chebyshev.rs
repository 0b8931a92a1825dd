//! Directional Chebyshev constants `Y_i(α)`, `Ỹ(α')`, the degree means
//! `T_s(λ_i)` and principal Chebyshev constants, by linear minimax over a
//! sampled compact set.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::asymptotics::{self, boundary_liminf_proxy, simplex_log_average, AsymError, SimplexPoint, TabulatedY};
use crate::idealcore::GroebnerContext;
use crate::infinitybasis::{ElementKind, OrderedBasisC};
use crate::linalg::EchelonSpace;
use crate::lp::{minimax, LpError, MinimaxOptions, MinimaxSolution};
use crate::numeric::BasisValues;
use crate::polycore::{GaussRational, MultiIndex, Polynomial, Scalar};

type Q = GaussRational;

/// Largest generator residual accepted for a sample point.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChebyError {
    #[error("sample set is empty")]
    Empty,
    #[error("sample {index} has {found} coordinates, expected {expected}")]
    Dimension { index: usize, expected: usize, found: usize },
    #[error("sample {index} is off the variety (residual {residual:e})")]
    OffVariety { index: usize, residual: f64 },
    #[error("minimax for element {element} failed: {source}")]
    Lp { element: usize, source: LpError },
    #[error("basis reaches degree {have}, table needs {need}")]
    Depth { need: u32, have: u32 },
    #[error("point index {i} out of range (d = {d})")]
    Index { i: usize, d: usize },
    #[error("table is missing level {0}")]
    Level(u32),
    #[error(transparent)]
    Asym(#[from] AsymError),
}

/// Sample points of a compact `K ⊆ V`, with `r = max ‖ζ‖`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCompact {
    pub label: String,
    pub points: Vec<Vec<Complex64>>,
    pub r: f64,
}

impl SampledCompact {
    /// Checks every point against the generators.
    pub fn new(label: impl Into<String>, points: Vec<Vec<Complex64>>, generators: &[Polynomial<Q>]) -> Result<Self, ChebyError> {
        if points.is_empty() {
            return Err(ChebyError::Empty);
        }
        let gens: Vec<Polynomial<Complex64>> = generators.iter().map(|g| g.to_float()).collect();
        let n = gens.first().map(|g| g.nvars()).unwrap_or(points[0].len());
        for (index, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(ChebyError::Dimension { index, expected: n, found: p.len() });
            }
            let residual = membership_residual(&gens, p);
            if !(residual < MEMBERSHIP_TOL) {
                return Err(ChebyError::OffVariety { index, residual });
            }
        }
        Ok(Self::unchecked(label, points))
    }

    pub fn unchecked(label: impl Into<String>, points: Vec<Vec<Complex64>>) -> Self {
        let r = points.iter().map(|p| p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).fold(0.0, f64::max);
        Self { label: label.into(), points, r }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Values of the whole basis at the samples.
    pub fn evaluate(&self, basis: &OrderedBasisC) -> BasisValues {
        let polys: Vec<Polynomial<Complex64>> = basis.elements.iter().map(|e| e.float.clone()).collect();
        BasisValues::new(&polys, &self.points)
    }
}

/// Largest `|g(ζ)|` over the generators.
pub fn membership_residual(generators: &[Polynomial<Complex64>], point: &[Complex64]) -> f64 {
    crate::numeric::eval_all(generators, point).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Minimax over the class of element `j`: target `e_j`, free `e_k` for `k < j`.
pub fn element_minimax(values: &BasisValues, j: usize, opts: &MinimaxOptions) -> Result<MinimaxSolution, ChebyError> {
    minimax(values.col(j), &values.cols()[..j], opts).map_err(|source| ChebyError::Lp { element: j, source })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TableKind {
    /// `Y_i`, with the zero-based point index.
    Directional(usize),
    Tilde,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry {
    /// Index of the target element in `𝒞`.
    pub element: usize,
    pub degree: u32,
    /// Attained `max |p|` at the samples.
    pub value: f64,
    /// LP lower bound.
    pub lower: f64,
    pub coeffs: Vec<Complex64>,
    pub real: bool,
}

impl TableEntry {
    fn from_solution(element: usize, degree: u32, sol: MinimaxSolution) -> Self {
        Self { element, degree, value: sol.value, lower: sol.lower, coeffs: sol.coeffs, real: sol.real }
    }

    /// Relative gap between the attained value and the LP bound.
    pub fn gap(&self) -> f64 {
        if self.value > 0.0 {
            (self.value - self.lower).max(0.0) / self.value
        } else {
            0.0
        }
    }
}

/// `α ↦ Y_i(α)` (or `α' ↦ Ỹ(α')`), filled up to `depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevTable {
    pub kind: TableKind,
    /// Number of exponent slots: `m` for `Y_i`, `m−1` for `Ỹ`.
    pub nvars: usize,
    pub depth: u32,
    /// `γ_m = (0,…,0,t)`.
    pub gamma: MultiIndex,
    pub samples: usize,
    pub entries: BTreeMap<MultiIndex, TableEntry>,
}

impl ChebyshevTable {
    pub fn value(&self, a: &MultiIndex) -> Option<f64> {
        self.entries.get(a).map(|e| e.value)
    }

    /// Values as a `TabulatedY` with offsets `{γ_m}`.
    pub fn to_tabulated(&self) -> TabulatedY {
        TabulatedY {
            m: self.nvars,
            depth: self.depth,
            values: self.entries.iter().map(|(a, e)| (a.clone(), e.value)).collect(),
            offsets: vec![self.gamma.clone()],
        }
    }

    /// Largest relative LP gap over the table.
    pub fn max_gap(&self) -> f64 {
        self.entries.values().map(TableEntry::gap).fold(0.0, f64::max)
    }
}

fn gamma(m: usize, t: u32) -> MultiIndex {
    let mut e = vec![0; m];
    e[m - 1] = t;
    MultiIndex::new(e)
}

/// Element index of `z^α·bv_i` for every `(α, i)` in the basis.
pub fn module_index(basis: &OrderedBasisC) -> BTreeMap<(MultiIndex, usize), usize> {
    let mut out = BTreeMap::new();
    for (j, e) in basis.elements.iter().enumerate() {
        if let ElementKind::StarStar { alpha, i } = &e.kind {
            out.insert((MultiIndex::new(alpha.clone()), *i), j);
        }
    }
    out
}

/// Elements whose minimax values a `Y_i` table of the given depth needs.
pub fn y_elements(basis: &OrderedBasisC, i: usize, depth: u32) -> Result<Vec<usize>, ChebyError> {
    if i >= basis.d {
        return Err(ChebyError::Index { i, d: basis.d });
    }
    if depth + basis.t > basis.s_max {
        return Err(ChebyError::Depth { need: depth + basis.t, have: basis.s_max });
    }
    let idx = module_index(basis);
    Ok(MultiIndex::up_to_degree(basis.m, depth).into_iter().map(|a| idx[&(a, i)]).collect())
}

/// Kept `(*)` elements, all of which the tilde table uses.
pub fn tilde_elements(basis: &OrderedBasisC) -> Vec<usize> {
    (0..basis.len()).filter(|&j| basis.elements[j].is_star()).collect()
}

/// `Y_i(α)` for `|α| ≤ depth`, with minimax values supplied by `solve`.
pub fn y_table_from(
    basis: &OrderedBasisC,
    i: usize,
    depth: u32,
    samples: usize,
    mut solve: impl FnMut(usize) -> Result<MinimaxSolution, ChebyError>,
) -> Result<ChebyshevTable, ChebyError> {
    let elems = y_elements(basis, i, depth)?;
    let mut entries = BTreeMap::new();
    for (a, j) in MultiIndex::up_to_degree(basis.m, depth).into_iter().zip(elems) {
        entries.insert(a, TableEntry::from_solution(j, basis.elements[j].degree, solve(j)?));
    }
    Ok(ChebyshevTable {
        kind: TableKind::Directional(i),
        nvars: basis.m,
        depth,
        gamma: gamma(basis.m, basis.t),
        samples,
        entries,
    })
}

pub fn y_table(basis: &OrderedBasisC, values: &BasisValues, i: usize, depth: u32, opts: &MinimaxOptions) -> Result<ChebyshevTable, ChebyError> {
    y_table_from(basis, i, depth, values.npoints(), |j| element_minimax(values, j, opts))
}

/// `Ỹ(α')` as the minimum over kept `(*)` elements with that `α'`. Empty
/// when `m = 1` or there are no `(*)` elements.
pub fn y_tilde_table_from(
    basis: &OrderedBasisC,
    samples: usize,
    mut solve: impl FnMut(usize) -> Result<MinimaxSolution, ChebyError>,
) -> Result<ChebyshevTable, ChebyError> {
    let mut entries: BTreeMap<MultiIndex, TableEntry> = BTreeMap::new();
    for j in tilde_elements(basis) {
        let ElementKind::Star { alpha_p, .. } = &basis.elements[j].kind else { unreachable!() };
        let entry = TableEntry::from_solution(j, basis.elements[j].degree, solve(j)?);
        let key = MultiIndex::new(alpha_p.clone());
        match entries.get(&key) {
            Some(old) if old.value <= entry.value => {}
            _ => {
                entries.insert(key, entry);
            }
        }
    }
    let nvars = basis.m - 1;
    let depth = entries.keys().map(|a| a.degree()).max().unwrap_or(0);
    Ok(ChebyshevTable {
        kind: TableKind::Tilde,
        nvars,
        depth,
        gamma: MultiIndex::zero(nvars),
        samples,
        entries,
    })
}

pub fn y_tilde_table(basis: &OrderedBasisC, values: &BasisValues, opts: &MinimaxOptions) -> Result<ChebyshevTable, ChebyError> {
    y_tilde_table_from(basis, values.npoints(), |j| element_minimax(values, j, opts))
}

/// `T_s(λ_i) = (Π_{|α|=s−t} Y_i(α))^{1/(s h_s)}`, computed in log space.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeMean {
    pub s: u32,
    pub value: f64,
    /// Number of zero `Y` values at the level (the value is then `0`).
    pub zeros: usize,
}

pub fn t_s_lambda(table: &ChebyshevTable, basis: &OrderedBasisC, s: u32) -> Result<DegreeMean, ChebyError> {
    if s < basis.t || s == 0 {
        return Err(ChebyError::Level(s));
    }
    let k = s - basis.t;
    if k > table.depth || s > basis.s_max {
        return Err(ChebyError::Level(s));
    }
    let mut acc = 0.0;
    let mut zeros = 0;
    for a in MultiIndex::of_degree(table.nvars, k) {
        let v = table.value(&a).ok_or(ChebyError::Level(k))?;
        if v <= 0.0 {
            zeros += 1;
        } else {
            acc += v.ln();
        }
    }
    let value = if zeros > 0 { 0.0 } else { (acc / (s as f64 * basis.h[s as usize] as f64)).exp() };
    Ok(DegreeMean { s, value, zeros })
}

/// Principal constant estimate `exp` of the top-level simplex log average.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalEstimate {
    pub value: f64,
    /// `(level, log average)` for levels `1..=depth`.
    pub series: Vec<(u32, f64)>,
    /// Least-squares slope of the tail of `series`.
    pub slope: f64,
    /// Zero entries at the top level.
    pub zeros: usize,
}

pub fn principal_constant(table: &ChebyshevTable) -> Result<PrincipalEstimate, ChebyError> {
    principal_constant_at(table, table.depth)
}

/// As [`principal_constant`], truncated at `level`.
pub fn principal_constant_at(table: &ChebyshevTable, level: u32) -> Result<PrincipalEstimate, ChebyError> {
    if level == 0 || level > table.depth {
        return Err(ChebyError::Level(level));
    }
    let y = table.to_tabulated();
    let mut series = Vec::new();
    let mut zeros = 0;
    for s in 1..=level {
        let avg = simplex_log_average(&y, s)?;
        zeros = avg.zeros;
        series.push((s, avg.value));
    }
    let top = series.last().expect("level ≥ 1").1;
    let finite: Vec<(u32, f64)> = series.iter().copied().filter(|(_, v)| v.is_finite()).collect();
    Ok(PrincipalEstimate { value: top.exp(), slope: asymptotics::tail_slope(&finite), series, zeros })
}

/// Pairs violating `Y(α+α̃+γ_m) ≤ Y(α)Y(α̃)(1+tol)`.
pub fn submult_property_test(table: &ChebyshevTable, tol: f64) -> Vec<(MultiIndex, MultiIndex)> {
    asymptotics::weak_submult_check(&table.to_tabulated(), tol)
}

/// Entries breaking `Y_i(α) ≤ r^{|α|}·‖bv_i‖_K·(1+tol)`.
pub fn growth_violations(table: &ChebyshevTable, r: f64, bv_norm: f64, tol: f64) -> Vec<MultiIndex> {
    table
        .entries
        .iter()
        .filter(|(a, e)| e.value > r.powi(a.degree() as i32) * bv_norm * (1.0 + tol))
        .map(|(a, _)| a.clone())
        .collect()
}

/// Entries breaking `Ỹ(α') ≤ r^{|α'|}(1+tol)`. Reported, never clamped.
pub fn tilde_ceiling_violations(table: &ChebyshevTable, r: f64, tol: f64) -> Vec<MultiIndex> {
    table
        .entries
        .iter()
        .filter(|(a, e)| e.value > r.powi(a.degree() as i32) * (1.0 + tol))
        .map(|(a, _)| a.clone())
        .collect()
}

/// Snap a solved minimizer of element `j` to an exact member of its class:
/// `e_j + Σ_{k<j} c_k e_k` with Gaussian-rational `c_k`.
pub fn exact_member(basis: &OrderedBasisC, j: usize, coeffs: &[Complex64], max_den: i64) -> Option<Polynomial<Q>> {
    let mut p = basis.elements[j].poly.clone();
    for (k, c) in coeffs.iter().enumerate() {
        let q = Q::approximate(*c, max_den)?;
        if !q.is_zero() {
            p = &p + &basis.elements[k].poly.scale(&q);
        }
    }
    Some(p)
}

/// Index of the leading (largest) element in the expansion of `p ∈ ℂ[V]`
/// over `𝒞`; `None` if `p` is zero or outside the span of the basis.
pub fn leading_element(basis: &OrderedBasisC, ctx: &GroebnerContext, p: &Polynomial<Q>) -> Option<usize> {
    let nf = ctx.normal_form(p);
    let top = nf.degree();
    if top < 0 || top as u32 > basis.s_max {
        return None;
    }
    let mut space = EchelonSpace::new();
    for e in basis.prefix(top as u32) {
        space.insert(&e.poly);
    }
    space.express(&nf)?.keys().next_back().copied()
}

/// One row of the tilde-vs-directional comparison at `(θ', 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TildeDirectionalRow {
    pub i: usize,
    pub theta_p: Vec<f64>,
    /// Proxy for `T^-(K, λ_i, (θ', 0))`.
    pub directional: f64,
    /// Proxy for `T̃^-(K, θ')`.
    pub tilde: f64,
    /// Whether some `C_{βi}` is nonzero, so the bound is asserted.
    pub applies: bool,
    pub holds: bool,
}

/// Finite-depth proxy for `liminf T̃(α')` as `α'/|α'| → θ'`, with
/// `T̃(α') = Ỹ(α')^{1/deg}` taken from the element realizing `Ỹ(α')`.
pub fn tilde_liminf_proxy(tilde: &ChebyshevTable, theta_p: &[f64], window: Option<f64>) -> Option<f64> {
    let depth = tilde.depth.max(1);
    let base = window.unwrap_or(2.0 * tilde.nvars.max(1) as f64 / depth as f64);
    for w in [base, 2.0 * base] {
        let best = tilde
            .entries
            .iter()
            .filter(|(a, e)| a.degree() > 0 && 2 * a.degree() >= tilde.depth && e.degree > 0)
            .filter(|(a, _)| {
                let k = a.degree() as f64;
                let dist: f64 = a.exps().iter().zip(theta_p).map(|(x, t)| (*x as f64 / k - t).powi(2)).sum();
                dist.sqrt() <= w
            })
            .map(|(_, e)| e.value.max(0.0).powf(1.0 / e.degree as f64))
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.min(x))));
        if best.is_some() {
            return best;
        }
    }
    None
}

/// Compares `T^-(K,λ_i,(θ',0))` with `T̃^-(K,θ')` for each directional
/// table. `nonzero_c[i]` says whether some `C_{βi} ≠ 0`. Diagnostic only.
pub fn tilde_directional_diagnostic(
    tables: &[ChebyshevTable],
    tilde: &ChebyshevTable,
    nonzero_c: &[bool],
    theta_p: &[f64],
    slack: f64,
) -> Result<Vec<TildeDirectionalRow>, ChebyError> {
    let Some(tilde_val) = tilde_liminf_proxy(tilde, theta_p, None) else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    for table in tables {
        let TableKind::Directional(i) = table.kind else { continue };
        let mut theta = theta_p.to_vec();
        theta.push(0.0);
        let b = SimplexPoint::new(theta)?;
        let directional = boundary_liminf_proxy(&table.to_tabulated(), &b, None)?;
        let applies = nonzero_c.get(i).copied().unwrap_or(false);
        out.push(TildeDirectionalRow {
            i,
            theta_p: theta_p.to_vec(),
            directional,
            tilde: tilde_val,
            applies,
            holds: directional <= tilde_val * (1.0 + slack),
        });
    }
    Ok(out)
}
