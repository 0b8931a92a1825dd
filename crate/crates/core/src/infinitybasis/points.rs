use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::idealcore::{GroebnerContext, NoetherData};
use crate::polycore::{GaussRational, MultiIndex, Polynomial, Scalar};

use super::{BasisError, PointAtInfinity};

type Q = GaussRational;

/// Relative gap below which two roots count as repeated.
pub const ROOT_GAP_TOL: f64 = 1e-8;

/// Largest denominator tried when snapping a float root to `Q(i)`.
const SNAP_MAX_DEN: i64 = 1 << 20;

/// Degree of the variety from the Hilbert function: the `m`-th difference
/// of `s ↦ dim C[V]_{≤s}` is eventually the constant `d`.
pub fn variety_degree(ctx: &GroebnerContext, m: usize) -> usize {
    let lt_sum: u32 = ctx.lt_set().iter().map(|mi| mi.degree()).sum();
    let mut s = lt_sum + ctx.nvars() as u32 + 2;
    let diff = |s: u32| -> i64 {
        // m-th backward difference of the cumulative count = (m-1)-th of the graded count
        let mut vals: Vec<i64> = (0..m as u32).map(|k| ctx.hilbert_graded(s - k) as i64).collect();
        for _ in 1..m {
            vals = vals.windows(2).map(|w| w[0] - w[1]).collect();
        }
        vals[0]
    };
    let mut prev = diff(s);
    for _ in 0..8 {
        s += 1;
        let cur = diff(s);
        if cur == prev {
            return cur.max(0) as usize;
        }
        prev = cur;
    }
    prev.max(0) as usize
}

/// Dense univariate polynomial, coefficients in ascending order.
type Uni = Vec<Q>;

fn trim(p: &mut Uni) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn uni_rem(a: &Uni, b: &Uni) -> Uni {
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db {
        let k = r.len() - 1 - db;
        let f = r.last().expect("nonempty").clone() / lb.clone();
        for (j, c) in b.iter().enumerate() {
            let v = r[k + j].clone() - f.clone() * c.clone();
            r[k + j] = v;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn uni_gcd(a: &Uni, b: &Uni) -> Uni {
    let (mut a, mut b) = (a.clone(), b.clone());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = uni_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Univariate image of `f` in the slot `var` after substituting values for
/// every other variable.
fn to_univariate(f: &Polynomial<Q>, var: usize, values: &[Q]) -> Uni {
    let mut out: Uni = Vec::new();
    for (mi, c) in f.terms() {
        let mut v = c.clone();
        for (k, e) in mi.exps().iter().enumerate() {
            if k != var {
                for _ in 0..*e {
                    v = v * values[k].clone();
                }
            }
        }
        let e = mi.get(var) as usize;
        if out.len() <= e {
            out.resize(e + 1, Q::zero());
        }
        let s = out[e].clone() + v;
        out[e] = s;
    }
    trim(&mut out);
    out
}

/// Sufficient squarefree test for a hypersurface monic in `z_n`: after a
/// random specialization of `z_1..z_{n-1}`, `gcd(f, ∂f/∂z_n)` is constant.
pub fn squarefree_certified(f: &Polynomial<Q>, seed: u64) -> bool {
    let n = f.nvars();
    let var = n - 1;
    let df = f.derivative(var);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4 {
        let values: Vec<Q> = (0..n).map(|_| Q::from_ints(rng.gen_range(-50..=50), rng.gen_range(-50..=50))).collect();
        let a = to_univariate(f, var, &values);
        let b = to_univariate(&df, var, &values);
        if a.len() < 2 || b.is_empty() {
            continue;
        }
        if uni_gcd(&a, &b).len() == 1 {
            return true;
        }
    }
    false
}

fn horner(coeffs: &[Complex64], w: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * w + p;
        p = p * w + c;
    }
    (p, dp)
}

/// Roots of a monic univariate polynomial (ascending coefficients, last = 1)
/// from companion-matrix eigenvalues, polished by Newton steps.
pub fn monic_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let mut comp = DMatrix::<Complex64>::zeros(d, d);
    for k in 1..d {
        comp[(k, k - 1)] = Complex64::new(1.0, 0.0);
    }
    for k in 0..d {
        comp[(k, d - 1)] = -coeffs[k];
    }
    let (_, t) = comp.schur().unpack();
    let mut roots: Vec<Complex64> = (0..d).map(|k| t[(k, k)]).collect();
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let (p, dp) = horner(coeffs, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *r -= step;
            if step.norm() <= 1e-15 * (1.0 + r.norm()) {
                break;
            }
        }
    }
    roots
}

/// Points `[0:…:0:1:β_i]` for a hypersurface `f` with `LT(f) = z_n^d`.
pub fn hypersurface_points(f: &Polynomial<Q>) -> Result<Vec<PointAtInfinity>, BasisError> {
    let n = f.nvars();
    let d = f.degree().max(0) as u32;
    let mut lead = vec![0u32; n];
    lead[n - 1] = d;
    if f.leading_monomial().map(|m| m.exps().to_vec()) != Some(lead) {
        return Err(BasisError::HypersurfaceLead);
    }
    // G(1, w): top-degree terms of f supported on z_{n-1}, z_n
    let mut g: Uni = vec![Q::zero(); d as usize + 1];
    for (mi, c) in f.terms() {
        if mi.degree() == d && mi.supported_in(n.saturating_sub(2)..n) {
            g[mi.get(n - 1) as usize] = c.clone();
        }
    }
    let lc = g[d as usize].clone();
    let g: Uni = g.into_iter().map(|c| c / lc.clone()).collect();
    let gf: Vec<Complex64> = g.iter().map(|c| c.to_c64()).collect();
    let roots = monic_roots(&gf);
    for i in 0..roots.len() {
        for j in 0..i {
            let scale = 1f64.max(roots[i].norm()).max(roots[j].norm());
            if (roots[i] - roots[j]).norm() / scale < ROOT_GAP_TOL {
                return Err(BasisError::RepeatedRoot { root: roots[i] });
            }
        }
    }
    let mut points = Vec::with_capacity(roots.len());
    for r in roots {
        let exact = GaussRational::approximate(r, SNAP_MAX_DEN).filter(|b| {
            // exact verification G(1, β) = 0
            let mut acc = Q::zero();
            for c in g.iter().rev() {
                acc = acc * b.clone() + c.clone();
            }
            acc.is_zero()
        });
        let Some(beta) = exact else {
            return Err(BasisError::IrrationalPoint { approx: vec![Complex64::new(1.0, 0.0), r] });
        };
        let mut coords = vec![Q::zero(); n + 1];
        if n >= 2 {
            coords[n - 1] = Q::one();
        }
        coords[n] = beta;
        points.push(PointAtInfinity::new(coords));
    }
    // deterministic order: real part descending, then imaginary part ascending
    points.sort_by(|a, b| {
        let (x, y) = (a.float()[n], b.float()[n]);
        y.re.total_cmp(&x.re).then(x.im.total_cmp(&y.im))
    });
    Ok(points)
}

/// Check user-supplied points against `I^h + <z_0..z_{m-1}>` and normalize
/// the `z_m` coordinate to one.
pub fn verify_supplied_points(
    ctx: &GroebnerContext,
    noether: &NoetherData,
    supplied: &[Vec<Q>],
    d: usize,
) -> Result<Vec<PointAtInfinity>, BasisError> {
    let n = ctx.nvars();
    let m = noether.m;
    if supplied.len() != d {
        return Err(BasisError::WrongPointCount { expected: d, found: supplied.len() });
    }
    let homog: Vec<Polynomial<Q>> = ctx.reduced_gb().iter().map(|g| g.homogenize().poly().clone()).collect();
    let mut out = Vec::with_capacity(d);
    for (idx, p) in supplied.iter().enumerate() {
        if p.len() != n + 1 {
            return Err(BasisError::InvalidPoint { index: idx, reason: format!("expected {} coordinates", n + 1) });
        }
        if let Some(k) = (0..m).find(|&k| !p[k].is_zero()) {
            return Err(BasisError::InvalidPoint { index: idx, reason: format!("coordinate z{k} is not zero") });
        }
        if p[m].is_zero() {
            return Err(BasisError::PointOffChart { index: idx });
        }
        let inv = Q::one() / p[m].clone();
        let coords: Vec<Q> = p.iter().map(|c| c.clone() * inv.clone()).collect();
        for g in &homog {
            if !eval_exact(g, &coords).is_zero() {
                return Err(BasisError::InvalidPoint { index: idx, reason: "not on the projective closure".into() });
            }
        }
        out.push(PointAtInfinity::new(coords));
    }
    for i in 0..out.len() {
        for j in 0..i {
            if out[i].coords() == out[j].coords() {
                return Err(BasisError::InvalidPoint { index: i, reason: "repeated point".into() });
            }
        }
    }
    Ok(out)
}

pub(crate) fn eval_exact(p: &Polynomial<Q>, x: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (mi, c) in p.terms() {
        let mut v = c.clone();
        for (xi, e) in x.iter().zip(mi.exps()) {
            for _ in 0..*e {
                v = v * xi.clone();
            }
        }
        acc = acc + v;
    }
    acc
}

/// The single point `[0:…:0:1]` of `P` when `m = n`.
pub fn full_space_point(n: usize) -> PointAtInfinity {
    let mut coords = vec![Q::zero(); n + 1];
    coords[n] = Q::one();
    PointAtInfinity::new(coords)
}

pub(crate) fn unit_exps(n: usize, var: usize, e: u32) -> MultiIndex {
    let mut v = vec![0; n];
    v[var] = e;
    MultiIndex::new(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::parse_polynomial;

    fn p(s: &str, n: usize) -> Polynomial<Q> {
        parse_polynomial(s, n).unwrap()
    }

    #[test]
    fn companion_roots() {
        // w^2 + 1
        let c = |x: f64, y: f64| Complex64::new(x, y);
        let mut r = monic_roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        r.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-14);
        // (w-1)(w-2)(w-3)
        let mut r = monic_roots(&[c(-6.0, 0.0), c(11.0, 0.0), c(-6.0, 0.0), c(1.0, 0.0)]);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (k, x) in r.iter().enumerate() {
            assert!((x - c(k as f64 + 1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn sphere_points() {
        let pts = hypersurface_points(&p("z1^2 + z2^2 + z3^2 - 1", 3)).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].coords()[3], Q::from_ints(0, -1));
        assert_eq!(pts[1].coords()[3], Q::from_ints(0, 1));
        assert_eq!(pts[0].coords()[2], Q::one());
    }

    #[test]
    fn hyperbola_points() {
        let pts = hypersurface_points(&p("z2^2 - z1^2 - 1", 2)).unwrap();
        let betas: Vec<_> = pts.iter().map(|q| q.coords()[2].clone()).collect();
        assert_eq!(betas, vec![Q::from_i64(1), Q::from_i64(-1)]);
    }

    #[test]
    fn parabola_double_root() {
        assert!(matches!(hypersurface_points(&p("z2^2 - z1", 2)), Err(BasisError::RepeatedRoot { .. })));
    }

    #[test]
    fn squarefree_test() {
        assert!(squarefree_certified(&p("z1^2 + z2^2 + z3^2 - 1", 3), 1));
        assert!(!squarefree_certified(&p("z2^2 - 2*z1*z2 + z1^2", 2), 1));
    }

    #[test]
    fn degree_from_hilbert() {
        let sphere = GroebnerContext::new(3, vec![p("z1^2 + z2^2 + z3^2 - 1", 3)]).unwrap();
        assert_eq!(variety_degree(&sphere, 2), 2);
        let cubic = GroebnerContext::new(3, vec![p("z2 - z1^2", 3), p("z3 - z1^3", 3)]).unwrap();
        assert_eq!(variety_degree(&cubic, 1), 3);
        let plane = GroebnerContext::new(2, vec![]).unwrap();
        assert_eq!(variety_degree(&plane, 2), 1);
    }
}
