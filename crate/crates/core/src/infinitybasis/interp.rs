use std::collections::BTreeMap;

use crate::idealcore::GroebnerContext;
use crate::linalg::{inverse, solve};
use crate::polycore::{GaussRational, HomogPolynomial, MultiIndex, Polynomial, Scalar};

use super::points::{eval_exact, unit_exps};
use super::{BasisError, PointAtInfinity};

type Q = GaussRational;

/// Homogeneous form of degree `t` with `v_i(p_j) = δ_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interpolant {
    pub index: usize,
    pub v: HomogPolynomial<Q>,
}

/// Decomposition `NF(bv_i·bv_j) = Σ_k z_k q_k + q0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossWitness {
    pub j: usize,
    /// `q_1..q_{m-1}`.
    pub q: Vec<Polynomial<Q>>,
    pub q0: Polynomial<Q>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftedInterpolant {
    pub index: usize,
    pub bv: Polynomial<Q>,
    /// `h_1..h_{m-1}` with `NF(bv²) - NF(z_m^t bv) = Σ_k z_k h_k + h0`.
    pub h: Vec<Polynomial<Q>>,
    pub h0: Polynomial<Q>,
    pub cross: Vec<CrossWitness>,
    /// Whether every cross witness satisfies `deg q_k < 2t-1`.
    pub strict_cross_bound: bool,
}

fn eval_mono(mi: &MultiIndex, x: &[Q]) -> Q {
    eval_exact(&Polynomial::monomial(mi.clone(), Q::one()), x)
}

fn hypersurface_interpolants(points: &[PointAtInfinity], n: usize) -> Vec<Interpolant> {
    let d = points.len();
    let beta: Vec<Q> = points.iter().map(|p| p.coords()[n].clone()).collect();
    let zn = Polynomial::var(n + 1, n);
    let zn1 = Polynomial::var(n + 1, n - 1);
    (0..d)
        .map(|i| {
            let mut v = Polynomial::one(n + 1);
            for j in (0..d).filter(|&j| j != i) {
                let l = &zn - &zn1.scale(&beta[j]);
                let den = beta[i].clone() - beta[j].clone();
                v = (&v * &l).scale(&(Q::one() / den));
            }
            let deg = (d - 1) as u32;
            Interpolant { index: i, v: HomogPolynomial::new(v, deg).expect("product of linear forms") }
        })
        .collect()
}

/// Degree-`t` standard monomials of `I^h + (z0..z_{m-1})` and the inverse of
/// their evaluation matrix at the points, if it is square and invertible.
fn eval_inverse(j: &GroebnerContext, t: u32, points: &[PointAtInfinity]) -> Option<(Vec<MultiIndex>, Vec<Vec<Q>>)> {
    let monos = j.standard_monomials_of_degree(t);
    if monos.len() != points.len() {
        return None;
    }
    let e: Vec<Vec<Q>> = points.iter().map(|p| monos.iter().map(|mi| eval_mono(mi, p.coords())).collect()).collect();
    inverse(&e).map(|inv| (monos, inv))
}

/// Interpolation degree `t` and the interpolants `v_1..v_d`.
pub fn interpolants(
    ctx: &GroebnerContext,
    m: usize,
    points: &[PointAtInfinity],
    t_floor: u32,
    t_cap: u32,
    hypersurface: bool,
) -> Result<(u32, Vec<Interpolant>), BasisError> {
    let n = ctx.nvars();
    let d = points.len();
    let out = if hypersurface && t_floor < d as u32 {
        ((d - 1) as u32, hypersurface_interpolants(points, n))
    } else {
        let mut gens: Vec<Polynomial<Q>> = ctx.reduced_gb().iter().map(|g| g.homogenize().poly().clone()).collect();
        gens.extend((0..m).map(|k| Polynomial::var(n + 1, k)));
        let j = GroebnerContext::new(n + 1, gens)?;
        let mut found = None;
        for t in t_floor..=t_cap {
            let Some((monos, inv)) = eval_inverse(&j, t, points) else { continue };
            if eval_inverse(&j, t + 1, points).is_none() {
                continue;
            }
            let interps = (0..d)
                .map(|i| {
                    let mut v = Polynomial::zero(n + 1);
                    for (k, mi) in monos.iter().enumerate() {
                        v.add_term(mi.clone(), inv[k][i].clone());
                    }
                    Interpolant { index: i, v: HomogPolynomial::new(v, t).expect("degree-t monomials") }
                })
                .collect();
            found = Some((t, interps));
            break;
        }
        found.ok_or(BasisError::InterpolationFailed { cap: t_cap })?
    };
    for v in &out.1 {
        for (j, p) in points.iter().enumerate() {
            let want = if v.index == j { Q::one() } else { Q::zero() };
            if eval_exact(v.v.poly(), p.coords()) != want {
                return Err(BasisError::InterpolationFailed { cap: t_cap });
            }
        }
    }
    Ok(out)
}

/// Split `r` (degree ≤ 2t) as `Σ_{k=1}^{m-1} z_k h_k + h0` with `h_k`
/// homogeneous of degree `2t-1` and `deg h0 ≤ 2t-1`, matching the top
/// homogeneous part exactly in normal-form coordinates.
fn decompose(
    ctx: &GroebnerContext,
    m: usize,
    t: u32,
    r: &Polynomial<Q>,
) -> Result<(Vec<Polynomial<Q>>, Polynomial<Q>), String> {
    let n = ctx.nvars();
    if t == 0 {
        return if r.is_zero() { Ok((vec![Polynomial::zero(n); m - 1], r.clone())) } else { Err("nonzero relation at t = 0".into()) };
    }
    let top = r.homogeneous_part(2 * t);
    let monos = ctx.standard_monomials_of_degree(2 * t - 1);
    let mut cols: Vec<(usize, MultiIndex, Polynomial<Q>)> = Vec::new();
    for k in 0..m.saturating_sub(1) {
        for mi in &monos {
            let prod = ctx.normal_form(&Polynomial::monomial(mi.add(&unit_exps(n, k, 1)), Q::one()));
            cols.push((k, mi.clone(), prod.homogeneous_part(2 * t)));
        }
    }
    let mut rows: BTreeMap<MultiIndex, usize> = BTreeMap::new();
    for (mi, _) in top.terms().chain(cols.iter().flat_map(|c| c.2.terms())) {
        let next = rows.len();
        rows.entry(mi.clone()).or_insert(next);
    }
    let mut h = vec![Polynomial::zero(n); m.saturating_sub(1)];
    if !top.is_zero() {
        let mut a = vec![vec![Q::zero(); cols.len()]; rows.len()];
        for (c, (_, _, p)) in cols.iter().enumerate() {
            for (mi, v) in p.terms() {
                a[rows[mi]][c] = v.clone();
            }
        }
        let mut b = vec![Q::zero(); rows.len()];
        for (mi, v) in top.terms() {
            b[rows[mi]] = v.clone();
        }
        let x = solve(&a, &b).ok_or("top-degree part is not in the span of z_1..z_{m-1}")?;
        for ((k, mi, _), c) in cols.iter().zip(x) {
            h[*k].add_term(mi.clone(), c);
        }
    }
    let mut h0 = r.clone();
    for (k, hk) in h.iter().enumerate() {
        let zk = Polynomial::var(n, k);
        h0 = &h0 - &ctx.nf_mul(&zk, hk);
    }
    if h0.degree() > (2 * t - 1) as i64 {
        return Err(format!("remainder has degree {}", h0.degree()));
    }
    Ok((h, h0))
}

/// Lift each `v_i` to `bv_i` and certify its product relations.
pub fn lift_and_witness(
    ctx: &GroebnerContext,
    m: usize,
    t: u32,
    interps: &[Interpolant],
) -> Result<Vec<LiftedInterpolant>, BasisError> {
    let n = ctx.nvars();
    let bvs: Vec<Polynomial<Q>> = interps
        .iter()
        .map(|v| ctx.normal_form(&v.v.dehomogenize()).homogeneous_part(t))
        .collect();
    let zmt = Polynomial::monomial(unit_exps(n, m - 1, t), Q::one());
    let mut out = Vec::with_capacity(bvs.len());
    for (i, bv) in bvs.iter().enumerate() {
        let fail = |reason: String| BasisError::WitnessFailure { i, reason };
        if bv.is_zero() {
            return Err(fail("lift vanishes".into()));
        }
        let r_self = &ctx.nf_mul(bv, bv) - &ctx.nf_mul(&zmt, bv);
        let (h, h0) = decompose(ctx, m, t, &r_self).map_err(fail)?;
        let mut cross = Vec::new();
        let mut strict = true;
        for (j, other) in bvs.iter().enumerate().filter(|(j, _)| *j != i) {
            let r = ctx.nf_mul(bv, other);
            let (q, q0) = decompose(ctx, m, t, &r).map_err(|e| fail(format!("cross with bv{}: {e}", j + 1)))?;
            strict &= q.iter().all(|qk| qk.degree() < 2 * t as i64 - 1);
            cross.push(CrossWitness { j, q, q0 });
        }
        out.push(LiftedInterpolant { index: i, bv: bv.clone(), h, h0, cross, strict_cross_bound: strict });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infinitybasis::{BundleOptions, VarietyBundle, VarietySpec};
    use crate::polycore::parse_polynomial;

    fn p(s: &str, n: usize) -> Polynomial<Q> {
        parse_polynomial(s, n).unwrap()
    }

    fn sphere() -> VarietyBundle {
        let spec = VarietySpec {
            n: 3,
            m: 2,
            generators: vec![p("z1^2 + z2^2 + z3^2 - 1", 3)],
            radical_asserted: false,
            points_at_infinity: None,
        };
        VarietyBundle::prepare(&spec, &BundleOptions::default()).unwrap()
    }

    #[test]
    fn sphere_self_relation() {
        let b = sphere();
        let bv1 = b.bv(0);
        assert_eq!(b.ctx.nf_mul(bv1, bv1), &(&p("z2", 3) * bv1) + &p("(1/4)*z1^2 - 1/4", 3));
        assert_eq!(b.lifted[0].h, vec![p("(1/4)*z1", 3)]);
        assert_eq!(b.lifted[0].h0, p("-1/4", 3));
    }

    #[test]
    fn sphere_cross_relation_misses_strict_bound() {
        let b = sphere();
        assert_eq!(b.ctx.nf_mul(b.bv(0), b.bv(1)), p("1/4 - (1/4)*z1^2", 3));
        let c = &b.lifted[0].cross[0];
        assert_eq!(c.j, 1);
        assert_eq!(c.q, vec![p("-(1/4)*z1", 3)]);
        assert_eq!(c.q0, p("1/4", 3));
        assert!(!b.lifted[0].strict_cross_bound);
    }

    #[test]
    fn general_route_matches_closed_form_on_sphere() {
        let b = sphere();
        let (t, v) = interpolants(&b.ctx, 2, &b.points, 0, 8, false).unwrap();
        assert_eq!(t, 1);
        for (a, c) in v.iter().zip(&b.interpolants) {
            assert_eq!(a.v.dehomogenize(), c.v.dehomogenize());
        }
    }

    #[test]
    fn cubic_hypersurface_relations_hold() {
        // points at infinity at w = 0, 1, -1
        let f = p("z3^3 - z2^2*z3 - z1 - 1", 3);
        let spec = VarietySpec { n: 3, m: 2, generators: vec![f], radical_asserted: false, points_at_infinity: None };
        let b = VarietyBundle::prepare(&spec, &BundleOptions::default()).unwrap();
        assert_eq!(b.t, 2);
        let zm = p("z2^2", 3);
        for l in &b.lifted {
            let lhs = b.ctx.nf_mul(&l.bv, &l.bv);
            let mut rhs = b.ctx.nf_mul(&zm, &l.bv);
            rhs = &rhs + &b.ctx.nf_mul(&p("z1", 3), &l.h[0]);
            rhs = &rhs + &l.h0;
            assert_eq!(lhs, rhs);
        }
    }
}
