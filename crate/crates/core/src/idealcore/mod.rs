//! Reduced grevlex Groebner bases, normal forms, standard monomials, Hilbert
//! counts and verification of the Noether normalization hypotheses.

mod groebner;
mod noether;

use num_complex::Complex64;

use crate::polycore::{GaussRational, MultiIndex, PolyError, Polynomial, Scalar};

pub use groebner::{buchberger, reduce};
pub use noether::{
    apply_linear_change, noether_verify, random_linear_change, LinearChange, NoetherClause, NoetherData,
    NoetherFailure, NoetherWitness, DEFAULT_POWER_CAP,
};

type Q = GaussRational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdealError {
    #[error("the ideal is the unit ideal (the variety is empty)")]
    UnitIdeal,
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no invertible linear change found after {0} draws")]
    SingularChange(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// An ideal together with its reduced grevlex Groebner basis.
#[derive(Clone, Debug)]
pub struct GroebnerContext {
    n: usize,
    generators: Vec<Polynomial<Q>>,
    reduced_gb: Vec<Polynomial<Q>>,
    float_gb: Vec<Polynomial<Complex64>>,
    lt_set: Vec<MultiIndex>,
}

impl GroebnerContext {
    /// Compute the reduced basis of the ideal generated by `generators` in
    /// `n` variables. An empty list is the zero ideal.
    pub fn new(n: usize, generators: Vec<Polynomial<Q>>) -> Result<Self, IdealError> {
        let reduced_gb = buchberger(n, &generators)?;
        Ok(Self::from_reduced(n, generators, reduced_gb))
    }

    /// The unit ideal, for callers that want to carry it as a value.
    pub fn unit_ideal(n: usize) -> Self {
        let one = Polynomial::one(n);
        Self::from_reduced(n, vec![one.clone()], vec![one])
    }

    fn from_reduced(n: usize, generators: Vec<Polynomial<Q>>, reduced_gb: Vec<Polynomial<Q>>) -> Self {
        let lt_set = reduced_gb.iter().filter_map(|g| g.leading_monomial().cloned()).collect();
        let float_gb = reduced_gb.iter().map(|g| g.to_float()).collect();
        Self { n, generators, reduced_gb, float_gb, lt_set }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Polynomial<Q>] {
        &self.generators
    }

    pub fn reduced_gb(&self) -> &[Polynomial<Q>] {
        &self.reduced_gb
    }

    pub fn lt_set(&self) -> &[MultiIndex] {
        &self.lt_set
    }

    pub fn is_unit(&self) -> bool {
        self.lt_set.iter().any(|m| m.degree() == 0)
    }

    /// Whether `z^mi` lies in the leading-term ideal.
    pub fn in_lead_ideal(&self, mi: &MultiIndex) -> bool {
        self.lt_set.iter().any(|m| m.divides(mi))
    }

    pub fn is_standard(&self, mi: &MultiIndex) -> bool {
        !self.in_lead_ideal(mi)
    }

    /// Exact normal form.
    pub fn normal_form(&self, p: &Polynomial<Q>) -> Polynomial<Q> {
        reduce(p, &self.reduced_gb)
    }

    /// Float normal form against the converted basis.
    pub fn normal_form_float(&self, p: &Polynomial<Complex64>) -> Polynomial<Complex64> {
        reduce(p, &self.float_gb)
    }

    /// Normal form of a product, the algebra multiplication on normal forms.
    pub fn nf_mul(&self, a: &Polynomial<Q>, b: &Polynomial<Q>) -> Polynomial<Q> {
        self.normal_form(&(a * b))
    }

    /// Standard monomials of degree at most `s`, ascending in grevlex.
    pub fn standard_monomials(&self, s: u32) -> Vec<MultiIndex> {
        MultiIndex::up_to_degree(self.n, s).into_iter().filter(|m| self.is_standard(m)).collect()
    }

    /// Standard monomials of degree exactly `s`, ascending in grevlex.
    pub fn standard_monomials_of_degree(&self, s: u32) -> Vec<MultiIndex> {
        MultiIndex::of_degree(self.n, s).into_iter().filter(|m| self.is_standard(m)).collect()
    }

    /// `dim C[z]/I` restricted to degree at most `s`.
    pub fn hilbert_dim(&self, s: u32) -> usize {
        (0..=s).map(|k| self.hilbert_graded(k)).sum()
    }

    /// Number of standard monomials of degree exactly `s`.
    pub fn hilbert_graded(&self, s: u32) -> usize {
        self.standard_monomials_of_degree(s).len()
    }
}

/// Free functions mirroring the context methods.
pub fn groebner(n: usize, generators: Vec<Polynomial<Q>>) -> Result<GroebnerContext, IdealError> {
    GroebnerContext::new(n, generators)
}

pub fn normal_form<C: Scalar>(p: &Polynomial<C>, basis: &[Polynomial<C>]) -> Polynomial<C> {
    reduce(p, basis)
}

pub fn standard_monomials(ctx: &GroebnerContext, s: u32) -> Vec<MultiIndex> {
    ctx.standard_monomials(s)
}

pub fn hilbert_dim(ctx: &GroebnerContext, s: u32) -> usize {
    ctx.hilbert_dim(s)
}
