//! Points at infinity, interpolants and their lifts, and the ordered basis
//! 𝒞 of the coordinate ring built from monomial elements (kind `*`) and
//! module elements `z^α·bv_i` (kind `**`).

mod basis;
mod interp;
mod points;

use num_complex::Complex64;

use crate::idealcore::{noether_verify, GroebnerContext, IdealError, NoetherData, NoetherFailure, DEFAULT_POWER_CAP};
use crate::polycore::{GaussRational, HomogPolynomial, Polynomial, Scalar};

pub use basis::{
    build_basis, expand_in_bv, relevant_betas, BasisElement, BvExpansion, ElementKind, OrderedBasisC,
};
pub use interp::{interpolants, lift_and_witness, Interpolant, LiftedInterpolant, CrossWitness};
pub use points::{hypersurface_points, monic_roots, squarefree_certified, variety_degree, ROOT_GAP_TOL};

type Q = GaussRational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BasisError {
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error("{0}")]
    Noether(#[from] NoetherFailure),
    #[error("hypersurface leading term is not a pure power of the last variable")]
    HypersurfaceLead,
    #[error("points at infinity are not distinct: repeated root near {root}")]
    RepeatedRoot { root: Complex64 },
    #[error("point at infinity {approx:?} is not Gaussian-rational; exact construction unsupported")]
    IrrationalPoint { approx: Vec<Complex64> },
    #[error("expected {expected} points at infinity, found {found}")]
    WrongPointCount { expected: usize, found: usize },
    #[error("point {index} has zero z_m coordinate")]
    PointOffChart { index: usize },
    #[error("point {index} rejected: {reason}")]
    InvalidPoint { index: usize, reason: String },
    #[error("points at infinity must be supplied when m < n-1 and the ideal is not principal")]
    PointsRequired,
    #[error("radicality not certified; set radical_asserted to proceed")]
    RadicalityUnverified,
    #[error("no interpolation degree found up to t = {cap}")]
    InterpolationFailed { cap: u32 },
    #[error("product relation certification failed for bv{i}: {reason}")]
    WitnessFailure { i: usize, reason: String },
    #[error("module elements are dependent at degree {s} (alpha {alpha:?}, i = {i})")]
    StarStarDependent { s: u32, alpha: Vec<u32>, i: usize },
    #[error("degree {s} block has {found} elements, expected {expected}")]
    CountMismatch { s: u32, expected: usize, found: usize },
    #[error("expansion of the degree-t monomial failed: {0}")]
    Expansion(String),
}

/// Input description of a variety `V ⊆ C^n` of dimension `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct VarietySpec {
    pub n: usize,
    pub m: usize,
    pub generators: Vec<Polynomial<Q>>,
    pub radical_asserted: bool,
    /// Projective points `[z0:…:zn]`, required outside the hypersurface case.
    pub points_at_infinity: Option<Vec<Vec<Q>>>,
}

/// Point of `V̄ ∩ P` normalized so its `z_m` coordinate is one.
#[derive(Clone, Debug, PartialEq)]
pub struct PointAtInfinity {
    coords: Vec<Q>,
    float: Vec<Complex64>,
}

impl PointAtInfinity {
    pub fn new(coords: Vec<Q>) -> Self {
        let float = coords.iter().map(|c| c.to_c64()).collect();
        Self { coords, float }
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn float(&self) -> &[Complex64] {
        &self.float
    }
}

impl std::fmt::Display for PointAtInfinity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

/// Tuning knobs for [`VarietyBundle::prepare`].
#[derive(Clone, Debug)]
pub struct BundleOptions {
    pub t_floor: u32,
    /// Cap on the interpolation degree; `None` means `4d`.
    pub t_cap: Option<u32>,
    pub power_cap: u32,
    pub seed: u64,
}

impl Default for BundleOptions {
    fn default() -> Self {
        Self { t_floor: 0, t_cap: None, power_cap: DEFAULT_POWER_CAP, seed: 0x5eed }
    }
}

/// Everything upstream of the basis: ideal data, points at infinity,
/// interpolants and lifted interpolants with certified relations.
#[derive(Clone, Debug)]
pub struct VarietyBundle {
    pub ctx: GroebnerContext,
    pub m: usize,
    pub d: usize,
    pub t: u32,
    pub noether: NoetherData,
    pub points: Vec<PointAtInfinity>,
    pub interpolants: Vec<Interpolant>,
    pub lifted: Vec<LiftedInterpolant>,
    pub radical_certified: bool,
}

impl VarietyBundle {
    pub fn prepare(spec: &VarietySpec, opts: &BundleOptions) -> Result<Self, BasisError> {
        let ctx = GroebnerContext::new(spec.n, spec.generators.clone())?;
        let noether = noether_verify(&ctx, spec.m, opts.power_cap)?;
        let n = spec.n;
        let m = spec.m;
        let hypersurface = m + 1 == n && ctx.reduced_gb().len() == 1;
        let (points, radical_certified) = if m == n {
            (vec![points::full_space_point(n)], true)
        } else if hypersurface && spec.points_at_infinity.is_none() {
            let f = &ctx.reduced_gb()[0];
            let certified = points::squarefree_certified(f, opts.seed);
            (points::hypersurface_points(f)?, certified)
        } else {
            let supplied = spec.points_at_infinity.as_ref().ok_or(BasisError::PointsRequired)?;
            let d = variety_degree(&ctx, m);
            let certified = hypersurface && points::squarefree_certified(&ctx.reduced_gb()[0], opts.seed);
            (points::verify_supplied_points(&ctx, &noether, supplied, d)?, certified)
        };
        if !radical_certified && !spec.radical_asserted {
            return Err(BasisError::RadicalityUnverified);
        }
        let d = points.len();
        let (t, interps) = interpolants(&ctx, m, &points, opts.t_floor, opts.t_cap.unwrap_or(4 * d as u32), hypersurface)?;
        let lifted = lift_and_witness(&ctx, m, t, &interps)?;
        Ok(Self { ctx, m, d, t, noether, points, interpolants: interps, lifted, radical_certified })
    }

    pub fn n(&self) -> usize {
        self.ctx.nvars()
    }

    pub fn bv(&self, i: usize) -> &Polynomial<Q> {
        &self.lifted[i].bv
    }

    /// Homogenization helper used by fixtures: `p` as a degree-`k` form in `z0..zn`.
    pub fn homogenize_to(&self, p: &Polynomial<Q>, k: u32) -> HomogPolynomial<Q> {
        p.homogenize_to(k).expect("degree bound")
    }
}
