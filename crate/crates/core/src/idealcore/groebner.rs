use std::collections::BTreeSet;

use crate::polycore::{GaussRational, MultiIndex, Polynomial, Scalar};

use super::IdealError;

type Q = GaussRational;

/// Remainder of `p` on division by a monic `basis` (full reduction).
///
/// In float mode the cancelled leading term is removed explicitly, so round
/// off cannot leave a tiny copy behind and stall the loop.
pub fn reduce<C: Scalar>(p: &Polynomial<C>, basis: &[Polynomial<C>]) -> Polynomial<C> {
    let n = p.nvars();
    let mut work = p.clone();
    let mut rem = Polynomial::zero(n);
    let leads: Vec<(&MultiIndex, C)> = basis
        .iter()
        .filter_map(|g| g.leading().map(|(m, c)| (m, c.clone())))
        .collect();
    let scale = p.max_abs();
    while let Some((lm, lc)) = work.leading().map(|(m, c)| (m.clone(), c.clone())) {
        if !C::EXACT && lc.is_negligible(scale) {
            work.take_term(&lm);
            continue;
        }
        let hit = leads.iter().enumerate().find(|(_, (m, _))| m.divides(&lm));
        match hit {
            Some((k, (m, gc))) => {
                let shift = lm.checked_sub(m).expect("divisor");
                let f = lc / gc.clone();
                work.add_scaled_shifted(&basis[k], &shift, &-f);
                work.take_term(&lm);
            }
            None => {
                work.take_term(&lm);
                rem.add_term(lm, lc);
            }
        }
    }
    rem
}

fn s_polynomial(f: &Polynomial<Q>, g: &Polynomial<Q>) -> Polynomial<Q> {
    let (mf, cf) = f.leading().expect("nonzero");
    let (mg, cg) = g.leading().expect("nonzero");
    let l = mf.lcm(mg);
    let a = f.mul_term(&l.checked_sub(mf).expect("lcm"), &(Q::one() / cf.clone()));
    let b = g.mul_term(&l.checked_sub(mg).expect("lcm"), &(Q::one() / cg.clone()));
    &a - &b
}

fn lm(p: &Polynomial<Q>) -> &MultiIndex {
    p.leading_monomial().expect("nonzero basis element")
}

/// Buchberger's algorithm with the normal selection strategy and both
/// criteria, followed by reduction to the unique reduced basis.
pub fn buchberger(n: usize, generators: &[Polynomial<Q>]) -> Result<Vec<Polynomial<Q>>, IdealError> {
    for g in generators {
        if g.nvars() != n {
            return Err(IdealError::DimensionMismatch { expected: n, found: g.nvars() });
        }
    }
    let mut basis: Vec<Polynomial<Q>> = Vec::new();
    for g in generators {
        let r = reduce(g, &basis);
        if r.is_zero() {
            continue;
        }
        if r.degree() == 0 {
            return Err(IdealError::UnitIdeal);
        }
        basis.push(r.monic());
    }
    // pending pairs keyed by (lcm, i, j) so the smallest lcm is processed first
    let mut pairs: BTreeSet<(MultiIndex, usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.insert((lm(&basis[i]).lcm(lm(&basis[j])), i, j));
        }
    }
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    while let Some(key) = pairs.pop_first() {
        let (l, i, j) = key;
        done.insert((i, j));
        if lm(&basis[i]).is_coprime(lm(&basis[j])) {
            continue;
        }
        let processed = |a: usize, b: usize| done.contains(&(a.min(b), a.max(b)));
        let chain = (0..basis.len()).any(|k| {
            k != i && k != j && lm(&basis[k]).divides(&l) && processed(i, k) && processed(j, k)
        });
        if chain {
            continue;
        }
        let r = reduce(&s_polynomial(&basis[i], &basis[j]), &basis);
        if r.is_zero() {
            continue;
        }
        if r.degree() == 0 {
            return Err(IdealError::UnitIdeal);
        }
        let k = basis.len();
        basis.push(r.monic());
        for a in 0..k {
            pairs.insert((lm(&basis[a]).lcm(lm(&basis[k])), a, k));
        }
    }
    Ok(reduce_basis(basis))
}

/// Minimalize and interreduce a Groebner basis; output sorted by leading monomial.
pub fn reduce_basis(basis: Vec<Polynomial<Q>>) -> Vec<Polynomial<Q>> {
    let mut minimal: Vec<Polynomial<Q>> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        let m = lm(g);
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            j != k && lm(h).divides(m) && (lm(h) != m || j < k)
        });
        if !redundant {
            minimal.push(g.monic());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Polynomial<Q>> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, g)| g.clone())
            .collect();
        let (m, c) = minimal[k].leading().map(|(m, c)| (m.clone(), c.clone())).expect("nonzero");
        let mut tail = minimal[k].clone();
        tail.take_term(&m);
        let mut r = reduce(&tail, &others);
        r.add_term(m, c);
        out.push(r);
    }
    out.sort_by(|a, b| lm(a).cmp(lm(b)));
    out
}
