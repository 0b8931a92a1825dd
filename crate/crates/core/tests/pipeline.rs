//! Variety → basis → Chebyshev tables → Fekete series, end to end.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use varcap_core::chebyshev::{element_minimax, principal_constant, submult_property_test, y_table, y_tilde_table, SampledCompact};
use varcap_core::fekete::{diameter_series, log_vandermonde, sandwich_check, BasisKind};
use varcap_core::infinitybasis::{build_basis, BundleOptions, OrderedBasisC, VarietyBundle, VarietySpec};
use varcap_core::lp::MinimaxOptions;
use varcap_core::numeric::BasisValues;
use varcap_core::polycore::parse_polynomial;

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

fn line_circle(radius: f64, count: usize) -> Vec<Vec<Complex64>> {
    (0..count).map(|k| vec![Complex64::from_polar(radius, 2.0 * PI * k as f64 / count as f64), Complex64::new(0.0, 0.0)]).collect()
}

fn fibonacci_sphere(count: usize) -> Vec<Vec<Complex64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            vec![Complex64::new(rho * phi.cos(), 0.0), Complex64::new(rho * phi.sin(), 0.0), Complex64::new(z, 0.0)]
        })
        .collect()
}

fn sphere_setup(s_max: u32, count: usize) -> (VarietyBundle, OrderedBasisC, SampledCompact, BasisValues) {
    let b = bundle(3, 2, &["z1^2 + z2^2 + z3^2 - 1"]);
    let basis = build_basis(&b, s_max).unwrap();
    let k = SampledCompact::new("sphere", fibonacci_sphere(count), b.ctx.generators()).unwrap();
    let values = k.evaluate(&basis);
    (b, basis, k, values)
}

#[test]
fn line_on_circle_of_radius_two() {
    let b = bundle(2, 1, &["z2"]);
    let basis = build_basis(&b, 5).unwrap();
    let k = SampledCompact::new("circle", line_circle(2.0, 720), b.ctx.generators()).unwrap();
    assert!((k.r - 2.0).abs() < 1e-12);
    let values = k.evaluate(&basis);
    let opts = MinimaxOptions::default();

    let table = y_table(&basis, &values, 0, 5, &opts).unwrap();
    for e in 0..=5u32 {
        let y = table.value(&varcap_core::polycore::MultiIndex::new(vec![e])).unwrap();
        assert!((y / 2f64.powi(e as i32) - 1.0).abs() < 1e-6, "Y({e}) = {y}");
    }
    let p = principal_constant(&table).unwrap();
    assert!((p.value - 2.0).abs() < 1e-6, "{}", p.value);

    // roots of unity are Fekete for 1, z, …, z^s: d_s = 2·(s+1)^{1/s}
    let series = diameter_series(&basis, &values, None, 5, 0, 50);
    for s in 1..=5u32 {
        let want = 2.0 * ((s + 1) as f64).powf(1.0 / s as f64);
        let got = series.row(s).unwrap().d_s;
        assert!((got - want).abs() < 1e-6, "s = {s}: {got} vs {want}");
    }
}

#[test]
fn sphere_tables_and_sandwich() {
    let (_, basis, k, values) = sphere_setup(3, 300);
    let opts = MinimaxOptions::default();
    let tables: Vec<_> = (0..basis.d).map(|i| y_table(&basis, &values, i, 2, &opts).unwrap()).collect();
    for tb in &tables {
        assert!(submult_property_test(tb, 1e-6 + tb.max_gap()).is_empty());
    }
    let tilde = y_tilde_table(&basis, &values, &opts).unwrap();
    let y: Vec<f64> = (0..basis.len()).map(|j| element_minimax(&values, j, &opts).unwrap().value).collect();
    let series = diameter_series(&basis, &values, None, 3, 1, 20);
    assert!(series.stopped.is_none());
    let report = sandwich_check(&basis, &series, &y, &tables, Some(&tilde), k.r, 0.05);
    assert!(report.all_pass(), "worst margin {}", report.worst_margin());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn log_vandermonde_ignores_point_order(picks in proptest::collection::btree_set(0usize..200, 9), shift in 1usize..9) {
        let (_, basis, _, values) = sphere_setup(2, 200);
        let config: Vec<usize> = picks.into_iter().collect();
        prop_assume!(config.len() == basis.m_s(2));
        let mut rotated = config.clone();
        rotated.rotate_left(shift);
        let a = log_vandermonde(&values, &config, BasisKind::Ordered).unwrap().log_abs;
        let b = log_vandermonde(&values, &rotated, BasisKind::Ordered).unwrap().log_abs;
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
