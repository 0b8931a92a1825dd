//! Built-in suites for `verify` and `limits`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varcap_core::asymptotics::{log_convexity_defect, simplex_log_average, t_estimate, weak_submult_check, SimplexPoint, TabulatedY};
use varcap_core::infinitybasis::{build_basis, BasisElement, BundleOptions, ElementKind, VarietyBundle, VarietySpec};
use varcap_core::linalg::rank;
use varcap_core::polycore::{parse_polynomial, GaussRational, MultiIndex, Polynomial};

use crate::report::{num, Check, Csv};

type Q = GaussRational;

/// `1`, `z1`, `bv1`, `z1z2bv2`, … for an element of `𝒞`.
pub fn element_label(e: &BasisElement) -> String {
    let mono = |x: &[u32]| {
        let mut s = String::new();
        for (k, p) in x.iter().enumerate() {
            match p {
                0 => {}
                1 => s.push_str(&format!("z{}", k + 1)),
                _ => s.push_str(&format!("z{}^{}", k + 1, p)),
            }
        }
        s
    };
    match &e.kind {
        ElementKind::Star { .. } => {
            let s = mono(e.monomial.exps());
            if s.is_empty() {
                "1".into()
            } else {
                s
            }
        }
        ElementKind::StarStar { alpha, i } => format!("{}bv{}", mono(alpha), i + 1),
    }
}

fn sphere_bundle() -> Result<VarietyBundle, String> {
    let spec = VarietySpec {
        n: 3,
        m: 2,
        generators: vec![parse_polynomial("z1^2 + z2^2 + z3^2 - 1", 3).map_err(|e| e.to_string())?],
        radical_asserted: false,
        points_at_infinity: None,
    };
    VarietyBundle::prepare(&spec, &BundleOptions::default()).map_err(|e| e.to_string())
}

fn poly(s: &str, n: usize) -> Polynomial<Q> {
    parse_polynomial(s, n).expect("fixture polynomial")
}

/// Exact fixtures on the complexified sphere.
pub fn sphere_fixture_checks() -> Vec<Check> {
    let start = Instant::now();
    let mut out = Vec::new();
    let b = match sphere_bundle() {
        Ok(b) => b,
        Err(e) => return vec![Check::new("fixture.sphere", false, e)],
    };
    let lt = b.ctx.reduced_gb()[0].leading_monomial().map(|m| m.exps().to_vec());
    out.push(Check::new("fixture.sphere.lt", lt == Some(vec![0, 0, 2]), format!("{lt:?}")));
    let pts: Vec<String> = b.points.iter().map(|p| p.to_string()).collect();
    out.push(Check::new("fixture.sphere.points", pts == ["[0:0:1:(-i)]", "[0:0:1:(i)]"], pts.join(" ")));
    out.push(Check::new("fixture.sphere.t", b.t == 1, format!("t = {}", b.t)));
    let bv_ok = b.bv(0) == &poly("(1/2)*z2 + (1/2i)*z3", 3) && b.bv(1) == &poly("(1/2)*z2 - (1/2i)*z3", 3);
    out.push(Check::new("fixture.sphere.bv", bv_ok, format!("bv1 = {}, bv2 = {}", b.bv(0), b.bv(1))));
    match build_basis(&b, 3) {
        Ok(c) => {
            let labels: Vec<String> = c.elements.iter().take(10).map(element_label).collect();
            let want = ["1", "z1", "bv1", "bv2", "z1^2", "z1bv1", "z1bv2", "z2bv1", "z2bv2", "z1^3"];
            out.push(Check::new("fixture.sphere.prefix", labels == want, labels.join(",")));
            // z0^2, z0z1, z1^2, z0bv1, z1bv1, bv1^2, z0bv2, z1bv2, bv2^2 dehomogenized
            let listed: Vec<Polynomial<Q>> = ["1", "z1", "z1^2"]
                .iter()
                .map(|s| poly(s, 3))
                .chain((0..2).flat_map(|i| [b.bv(i).clone(), &poly("z1", 3) * b.bv(i), b.bv(i) * b.bv(i)]))
                .map(|p| b.ctx.normal_form(&p))
                .collect();
            let ours: Vec<Polynomial<Q>> = c.prefix(2).iter().map(|e| e.poly.clone()).collect();
            let monos = b.ctx.standard_monomials(2);
            let rows = |ps: &[Polynomial<Q>]| -> Vec<Vec<Q>> { ps.iter().map(|p| monos.iter().map(|mi| p.coeff(mi)).collect()).collect() };
            let joint: Vec<Polynomial<Q>> = listed.iter().chain(&ours).cloned().collect();
            let (r1, r2, r3) = (rank(&rows(&listed)), rank(&rows(&ours)), rank(&rows(&joint)));
            out.push(Check::new("fixture.sphere.degree2_span", r1 == 9 && r2 == 9 && r3 == 9, format!("ranks {r1}, {r2}, joint {r3}")));
            let homog: Vec<String> = c.prefix(2).iter().map(|e| b.homogenize_to(&e.poly, 2).to_string()).collect();
            out.push(Check::new("fixture.sphere.homogenized", homog.len() == 9, homog.join(", ")));
        }
        Err(e) => out.push(Check::new("fixture.sphere.prefix", false, e.to_string())),
    }
    let nf = b.ctx.nf_mul(b.bv(0), b.bv(0));
    let want = &(&poly("z2", 3) * b.bv(0)) + &poly("(1/4)*z1^2 - 1/4", 3);
    out.push(Check::new("fixture.sphere.relation", nf == b.ctx.normal_form(&want), format!("NF(bv1^2) = {nf}")));
    let ms = start.elapsed().as_secs_f64();
    out.push(Check::new("fixture.sphere.runtime", ms < 1.0, format!("{} s", num(ms))));
    out
}

/// Line `{z2 = 0}`: `t = 0`, `bv1 = 1`, `𝒞` is the monomial basis.
pub fn line_fixture_checks() -> Vec<Check> {
    let spec = VarietySpec { n: 2, m: 1, generators: vec![poly("z2", 2)], radical_asserted: false, points_at_infinity: None };
    match VarietyBundle::prepare(&spec, &BundleOptions::default()).and_then(|b| build_basis(&b, 6).map(|c| (b, c))) {
        Ok((b, c)) => {
            let ok = b.t == 0
                && b.bv(0) == &Polynomial::one(2)
                && c.elements.iter().enumerate().all(|(k, e)| e.poly == Polynomial::monomial(MultiIndex::new(vec![k as u32, 0]), Q::from_ints(1, 0)));
            vec![Check::new("fixture.line", ok, format!("t = {}, {} elements", b.t, c.len()))]
        }
        Err(e) => vec![Check::new("fixture.line", false, e.to_string())],
    }
}

fn multiplicative(r: &[f64], depth: u32) -> TabulatedY {
    let r = r.to_vec();
    TabulatedY::from_fn(r.len(), depth, vec![MultiIndex::zero(r.len())], move |a| {
        a.exps().iter().zip(&r).map(|(e, rk)| rk.powi(*e as i32)).product()
    })
}

fn random_interior(rng: &mut ChaCha8Rng, m: usize) -> SimplexPoint {
    let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    SimplexPoint::new(w.into_iter().map(|x| x / s).collect()).expect("interior point")
}

/// `max` that lets a NaN through, so failed evaluations fail the check.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Synthetic-oracle suite on multiplicative tables.
pub fn limits_checks(seed: u64) -> (Vec<Check>, Csv) {
    const S: u32 = 32;
    let r = [2.0, 0.5];
    let y = multiplicative(&r, S);
    let mut csv = Csv::new(["check", "level", "value", "expected"]);
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    for s in 1..=S {
        let v = simplex_log_average(&y, s).map(|a| a.value).unwrap_or(f64::NAN);
        worst = nan_max(worst, v.abs());
        csv.push(vec!["log_average".into(), s.to_string(), num(v), "0".into()]);
    }
    checks.push(Check::new("limits.log_average", worst <= 1e-10, format!("max |avg| = {} over levels 1..={S}", num(worst))));

    let log_scale: f64 = r.iter().map(|x: &f64| x.ln().abs()).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_t: f64 = 0.0;
    for _ in 0..20 {
        let th = random_interior(&mut rng, 2);
        let want: f64 = th.theta().iter().zip(&r).map(|(t, rk)| rk.powf(*t)).product();
        let got = t_estimate(&y, &th).map(|e| e.value).unwrap_or(f64::NAN);
        worst_t = nan_max(worst_t, (got.ln() - want.ln()).abs());
        csv.push(vec!["t_estimate".into(), S.to_string(), num(got), num(want)]);
    }
    let bound = log_scale / S as f64;
    checks.push(Check::new("limits.t_estimate", worst_t <= bound, format!("max log error {} ≤ {}", num(worst_t), num(bound))));

    let v = weak_submult_check(&y, 1e-12);
    checks.push(Check::new("limits.weak_submult", v.is_empty(), format!("{} violations", v.len())));

    let mut worst_c = f64::NEG_INFINITY;
    for _ in 0..100 {
        let a = random_interior(&mut rng, 2);
        let b = random_interior(&mut rng, 2);
        let d = log_convexity_defect(&y, &a, &b).unwrap_or(f64::NAN);
        worst_c = nan_max(worst_c, d);
    }
    let tol = 3.0 * bound;
    checks.push(Check::new("limits.log_convexity", worst_c <= tol, format!("max midpoint defect {} ≤ {} over 100 triples", num(worst_c), num(tol))));

    // grid average of θ1θ2 on Σ_3 against the Dirichlet(1,1,1) moment 1/12
    let grid = TabulatedY::from_fn(3, S, vec![], |a| {
        let s = a.degree().max(1) as f64;
        (a.exps()[0] as f64 / s * a.exps()[1] as f64).exp()
    });
    let mut errs = Vec::new();
    for s in [8, 16, 32] {
        let avg = simplex_log_average(&grid, s).map(|a| a.value).unwrap_or(f64::NAN);
        errs.push((s, (avg - 1.0 / 12.0).abs()));
        csv.push(vec!["grid_moment".into(), s.to_string(), num(avg), num(1.0 / 12.0)]);
    }
    let shrinking = errs.windows(2).all(|w| w[1].1 < w[0].1) && errs.last().is_some_and(|e| e.1 < 1.0 / S as f64);
    checks.push(Check::new("limits.grid_weak_star", shrinking, format!("errors {:?}", errs.iter().map(|e| num(e.1)).collect::<Vec<_>>())));
    (checks, csv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::all_pass;

    #[test]
    fn fixtures_pass() {
        let c = sphere_fixture_checks();
        assert!(all_pass(&c), "{c:#?}");
        assert!(all_pass(&line_fixture_checks()));
    }

    #[test]
    fn limits_pass() {
        let (c, csv) = limits_checks(1);
        assert!(all_pass(&c), "{c:#?}");
        assert!(!csv.is_empty());
    }
}
