use std::fmt;

use num_complex::Complex64;

use crate::linalg::EchelonSpace;
use crate::polycore::{GaussRational, MultiIndex, Polynomial, Scalar};

use super::{BasisError, VarietyBundle};

type Q = GaussRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementKind {
    /// `z^{α'} z_m^l z^β` with `α'` over `z_1..z_{m-1}` and `z_m^l z^β ∈ ℬ`.
    Star { alpha_p: Vec<u32>, l: u32, beta: Vec<u32> },
    /// `z^α·bv_i` with `α` over `z_1..z_m`.
    StarStar { alpha: Vec<u32>, i: usize },
}

#[derive(Clone, Debug)]
pub struct BasisElement {
    pub kind: ElementKind,
    pub degree: u32,
    /// The monomial itself for `*`, the multiplier `z^α` for `**`.
    pub monomial: MultiIndex,
    /// Normal form of the element.
    pub poly: Polynomial<Q>,
    pub float: Polynomial<Complex64>,
    /// Whether the defining product was already a normal form.
    pub raw_is_normal_form: bool,
}

impl BasisElement {
    pub fn is_star(&self) -> bool {
        matches!(self.kind, ElementKind::Star { .. })
    }
}

fn fmt_exps(e: &[u32]) -> String {
    let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ElementKind::Star { alpha_p, l, beta } => write!(
                f,
                "*\t{}\talpha'={} l={} beta={}\t{}",
                self.degree,
                fmt_exps(alpha_p),
                l,
                fmt_exps(beta),
                self.poly
            ),
            ElementKind::StarStar { alpha, i } => {
                write!(f, "**\t{}\talpha={} i={}\t{}", self.degree, fmt_exps(alpha), i + 1, self.poly)
            }
        }
    }
}

/// The ordered basis `𝒞` up to degree `s_max`, with its counting data.
#[derive(Clone, Debug)]
pub struct OrderedBasisC {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub t: u32,
    pub s_max: u32,
    pub elements: Vec<BasisElement>,
    /// `ℬ` as monomials supported in `z_m..z_n`, ascending.
    pub calb: Vec<MultiIndex>,
    /// `h_s` for `s = 0..=s_max`.
    pub h: Vec<usize>,
}

/// Number of monomials of degree `k` in `m` variables; zero for negative `k`.
pub fn h_m(m: usize, k: i64) -> usize {
    if k < 0 {
        return 0;
    }
    crate::asymptotics::h_m(m, k as u32) as usize
}

impl OrderedBasisC {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `m_s`, the number of elements of degree at most `s`.
    pub fn m_s(&self, s: u32) -> usize {
        self.h[..=s as usize].iter().sum()
    }

    /// `l_s = Σ_{ν≤s} ν h_ν`.
    pub fn l_s(&self, s: u32) -> usize {
        self.h[..=s as usize].iter().enumerate().map(|(nu, h)| nu * h).sum()
    }

    /// `a_s = h_s − d·h_m(s−t)`.
    pub fn a_s(&self, s: u32) -> i64 {
        self.h[s as usize] as i64 - (self.d * h_m(self.m, s as i64 - self.t as i64)) as i64
    }

    /// `b_τ = Σ_{s=t}^{τ} h_m(s−t)`.
    pub fn b_tau(&self, tau: u32) -> usize {
        (self.t..=tau).map(|s| h_m(self.m, (s - self.t) as i64)).sum()
    }

    /// Elements of degree at most `s`.
    pub fn prefix(&self, s: u32) -> &[BasisElement] {
        &self.elements[..self.m_s(s)]
    }

    /// One element per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for e in &self.elements {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}

fn calb(bundle: &VarietyBundle) -> Vec<MultiIndex> {
    let n = bundle.n();
    let m = bundle.m;
    if bundle.t == 0 {
        return Vec::new();
    }
    bundle
        .ctx
        .standard_monomials(bundle.t - 1)
        .into_iter()
        .filter(|mi| mi.supported_in(m - 1..n))
        .collect()
}

/// Monomials of degree `k` in slots `0..r` embedded in `n` slots, ascending.
fn head_monomials(n: usize, r: usize, k: u32) -> Vec<MultiIndex> {
    MultiIndex::of_degree(r, k)
        .into_iter()
        .map(|mi| {
            let mut e = mi.exps().to_vec();
            e.resize(n, 0);
            MultiIndex::new(e)
        })
        .collect()
}

/// Build `𝒞` through degree `s_max`: module elements are inserted first
/// (dependence is a hard error), then monomial candidates are kept in
/// grevlex order when independent. Within a degree the kept `*` elements
/// precede the `**` elements.
pub fn build_basis(bundle: &VarietyBundle, s_max: u32) -> Result<OrderedBasisC, BasisError> {
    let ctx = &bundle.ctx;
    let n = bundle.n();
    let m = bundle.m;
    let t = bundle.t;
    let calb = calb(bundle);
    let mut space: EchelonSpace<Q> = EchelonSpace::new();
    let mut elements = Vec::new();
    let mut h = Vec::new();
    for s in 0..=s_max {
        let mut starstar = Vec::new();
        if s >= t {
            for alpha in head_monomials(n, m, s - t) {
                for (i, bv) in bundle.lifted.iter().enumerate() {
                    let raw = bv.bv.mul_term(&alpha, &Q::one());
                    let poly = ctx.normal_form(&raw);
                    if !space.insert(&poly) {
                        return Err(BasisError::StarStarDependent { s, alpha: alpha.exps()[..m].to_vec(), i });
                    }
                    starstar.push(BasisElement {
                        kind: ElementKind::StarStar { alpha: alpha.exps()[..m].to_vec(), i },
                        degree: s,
                        monomial: alpha.clone(),
                        float: poly.to_float(),
                        raw_is_normal_form: raw == poly,
                        poly,
                    });
                }
            }
        }
        let mut candidates: Vec<(MultiIndex, &MultiIndex)> = Vec::new();
        for b in calb.iter().filter(|b| b.degree() <= s) {
            for ap in head_monomials(n, m - 1, s - b.degree()) {
                candidates.push((ap.add(b), b));
            }
        }
        candidates.sort();
        let mut star = Vec::new();
        for (mono, b) in candidates {
            let poly = ctx.normal_form(&Polynomial::monomial(mono.clone(), Q::one()));
            if !space.insert(&poly) {
                continue;
            }
            let alpha_p = mono.exps()[..m - 1].to_vec();
            star.push(BasisElement {
                kind: ElementKind::Star { alpha_p, l: b.get(m - 1), beta: b.exps()[m..].to_vec() },
                degree: s,
                raw_is_normal_form: ctx.is_standard(&mono),
                monomial: mono,
                float: poly.to_float(),
                poly,
            });
        }
        let expected = ctx.hilbert_graded(s);
        let found = star.len() + starstar.len();
        if found != expected {
            return Err(BasisError::CountMismatch { s, expected, found });
        }
        h.push(found);
        elements.extend(star);
        elements.extend(starstar);
    }
    Ok(OrderedBasisC { n, m, d: bundle.d, t, s_max, elements, calb, h })
}

/// Coefficients `C_{β1..βd}` and remainder `q` with
/// `z_m^{t-|β|} z^β = Σ_i C_{βi} bv_i + q`, `q` in the span of the `*`
/// elements of degree at most `t`. `beta` is given over `z_{m+1}..z_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BvExpansion {
    pub c: Vec<Q>,
    pub q: Polynomial<Q>,
}

pub fn expand_in_bv(basis: &OrderedBasisC, bundle: &VarietyBundle, beta: &[u32]) -> Result<BvExpansion, BasisError> {
    let n = basis.n;
    let m = basis.m;
    let t = basis.t;
    if beta.len() != n - m {
        return Err(BasisError::Expansion(format!("beta has {} entries, expected {}", beta.len(), n - m)));
    }
    let bdeg: u32 = beta.iter().sum();
    if bdeg > t {
        return Err(BasisError::Expansion(format!("|beta| = {bdeg} exceeds t = {t}")));
    }
    if basis.s_max < t {
        return Err(BasisError::Expansion("basis not built through degree t".into()));
    }
    let mut e = vec![0; n];
    e[m - 1] = t - bdeg;
    e[m..].copy_from_slice(beta);
    let target = bundle.ctx.normal_form(&Polynomial::monomial(MultiIndex::new(e), Q::one()));
    let prefix = basis.prefix(t);
    let mut space: EchelonSpace<Q> = EchelonSpace::new();
    for el in prefix {
        space.insert(&el.poly);
    }
    let coords = space.express(&target).ok_or_else(|| BasisError::Expansion("monomial outside the span".into()))?;
    let mut c = vec![Q::zero(); basis.d];
    let mut q = Polynomial::zero(n);
    for (k, v) in coords {
        match &prefix[k].kind {
            ElementKind::StarStar { i, .. } => c[*i] = v,
            ElementKind::Star { .. } => q = &q + &prefix[k].poly.scale(&v),
        }
    }
    if c.iter().all(|x| x.is_zero()) {
        return Err(BasisError::Expansion("all bv coefficients vanish".into()));
    }
    Ok(BvExpansion { c, q })
}

/// The distinct `β` (over `z_{m+1}..z_n`) occurring in `ℬ`, ascending.
pub fn relevant_betas(basis: &OrderedBasisC) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = basis.calb.iter().map(|b| b.exps()[basis.m..].to_vec()).collect();
    out.sort();
    out.dedup();
    out
}
