//! Orchestration of the `basis`, `cheby` and `diameter` runs.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use varcap_core::asymptotics::h_m;
use varcap_core::chebyshev::{
    self, element_minimax, growth_violations, principal_constant, submult_property_test, t_s_lambda, tilde_ceiling_violations,
    tilde_directional_diagnostic, y_elements, y_table_from, y_tilde_table_from, ChebyError, ChebyshevTable, DegreeMean,
    PrincipalEstimate, SampledCompact,
};
use varcap_core::fekete::{
    diameter_series, product_formula_compare, sandwich_check, standard_basis_polys, std_basis_ratio, DiameterSeries, ProductReport,
    SandwichReport, StdRatioReport,
};
use varcap_core::infinitybasis::{build_basis, expand_in_bv, relevant_betas, BasisError, BundleOptions, ElementKind, OrderedBasisC, VarietyBundle};
use varcap_core::linalg::EchelonSpace;
use varcap_core::lp::{MinimaxOptions, MinimaxSolution};
use varcap_core::numeric::BasisValues;
use varcap_core::polycore::Scalar;

use crate::config::{ConfigError, RunConfig};
use crate::report::{num, opt_num, Check, Csv};
use crate::sampler::{sample_compact, SampleError};
use crate::variety::{VarietyError, VarietyFile};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("basis construction failed: {0}")]
    Basis(#[from] BasisError),
    #[error("{0}")]
    Cheby(#[from] ChebyError),
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for input problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Variety(_) | RunError::Sample(_) => 2,
            _ => 3,
        }
    }
}

/// Variety, basis and samples of one run.
pub struct Prepared {
    pub config: RunConfig,
    pub base_dir: PathBuf,
    pub label: String,
    pub bundle: VarietyBundle,
    pub basis: OrderedBasisC,
    pub compact: SampledCompact,
    pub pool: rayon::ThreadPool,
}

pub fn prepare(config: &RunConfig, base_dir: &Path) -> Result<Prepared, RunError> {
    config.validate()?;
    let file = VarietyFile::load(&base_dir.join(&config.variety))?;
    let spec = file.to_spec()?;
    let opts = BundleOptions { seed: config.seed, ..BundleOptions::default() };
    let bundle = VarietyBundle::prepare(&spec, &opts)?;
    let basis = build_basis(&bundle, config.s_max)?;
    let compact = sample_compact(&config.compact, spec.n, None, base_dir, &spec.generators)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.threads).build()?;
    Ok(Prepared { config: config.clone(), base_dir: base_dir.to_path_buf(), label: file.label(), bundle, basis, compact, pool })
}

impl Prepared {
    pub fn candidates(&self) -> Result<SampledCompact, RunError> {
        let n = self.basis.n;
        Ok(sample_compact(&self.config.compact, n, Some(self.config.candidate_count()), &self.base_dir, self.bundle.ctx.generators())?)
    }

    /// Minimax values of the listed elements, solved in the pool and
    /// returned in element order.
    pub fn solve(&self, values: &BasisValues, elements: &BTreeSet<usize>) -> Result<BTreeMap<usize, MinimaxSolution>, ChebyError> {
        let opts: MinimaxOptions = self.config.lp.options();
        let list: Vec<usize> = elements.iter().copied().collect();
        let solved: Vec<Result<MinimaxSolution, ChebyError>> =
            self.pool.install(|| list.par_iter().map(|&j| element_minimax(values, j, &opts)).collect());
        list.into_iter().zip(solved).map(|(j, r)| r.map(|s| (j, s))).collect()
    }

    fn depth(&self) -> Option<u32> {
        self.config.s_max.checked_sub(self.basis.t)
    }
}

/// Count identities, each computed two ways.
pub fn count_checks(basis: &OrderedBasisC, bundle: &VarietyBundle) -> Vec<Check> {
    let mut bad = Vec::new();
    let (d, m, t) = (basis.d, basis.m, basis.t);
    for s in 0..=basis.s_max {
        let block: Vec<_> = basis.elements.iter().filter(|e| e.degree == s).collect();
        if block.len() != basis.h[s as usize] {
            bad.push(format!("h_{s}"));
        }
        if basis.m_s(s) != bundle.ctx.hilbert_dim(s) {
            bad.push(format!("m_{s}"));
        }
        let l_direct: usize = basis.elements[..basis.m_s(s)].iter().map(|e| e.degree as usize).sum();
        if basis.l_s(s) != l_direct {
            bad.push(format!("l_{s}"));
        }
        let ss = block.iter().filter(|e| !e.is_star()).count();
        let want = if s >= t { d * h_m(m, s - t) as usize } else { 0 };
        if ss != want {
            bad.push(format!("starstar_{s}"));
        }
        if basis.a_s(s) < 0 || basis.a_s(s) as usize != block.len() - ss {
            bad.push(format!("a_{s}"));
        }
        if s >= t {
            let b_direct = basis.elements[..basis.m_s(s)].iter().filter(|e| !e.is_star()).count() / d.max(1);
            if basis.b_tau(s) != b_direct {
                bad.push(format!("b_{s}"));
            }
        }
    }
    let mut space = EchelonSpace::new();
    let independent = basis.elements.iter().filter(|e| !e.is_star()).all(|e| space.insert(&e.poly));
    vec![
        Check::new("counts", bad.is_empty(), if bad.is_empty() { format!("s ≤ {}", basis.s_max) } else { format!("mismatch at {}", bad.join(" ")) }),
        Check::new("counts.starstar_rank", independent, format!("{} module elements, exact rank", space.dim())),
    ]
}

pub fn counts_csv(basis: &OrderedBasisC, bundle: &VarietyBundle) -> Csv {
    let mut csv = Csv::new(["s", "h_s", "m_s", "l_s", "a_s", "b_tau", "hilbert_dim", "starstar"]);
    for s in 0..=basis.s_max {
        let ss = basis.elements.iter().filter(|e| e.degree == s && !e.is_star()).count();
        let b = if s >= basis.t { basis.b_tau(s) } else { 0 };
        csv.push(vec![
            s.to_string(),
            basis.h[s as usize].to_string(),
            basis.m_s(s).to_string(),
            basis.l_s(s).to_string(),
            basis.a_s(s).to_string(),
            b.to_string(),
            bundle.ctx.hilbert_dim(s).to_string(),
            ss.to_string(),
        ]);
    }
    csv
}

pub struct BasisRun {
    pub dump: String,
    pub counts: Csv,
    pub checks: Vec<Check>,
}

pub fn run_basis(prep: &Prepared) -> BasisRun {
    BasisRun { dump: prep.basis.dump(), counts: counts_csv(&prep.basis, &prep.bundle), checks: count_checks(&prep.basis, &prep.bundle) }
}

pub struct ChebyRun {
    pub tables: Vec<ChebyshevTable>,
    pub tilde: ChebyshevTable,
    pub principal: Vec<PrincipalEstimate>,
    pub degree_means: Vec<Vec<DegreeMean>>,
    pub checks: Vec<Check>,
}

/// Directional and tilde tables from a set of solved elements.
pub fn tables_from(
    basis: &OrderedBasisC,
    depth: u32,
    samples: usize,
    solved: &BTreeMap<usize, MinimaxSolution>,
) -> Result<(Vec<ChebyshevTable>, ChebyshevTable), ChebyError> {
    let get = |j: usize| Ok(solved[&j].clone());
    let tables = (0..basis.d).map(|i| y_table_from(basis, i, depth, samples, get)).collect::<Result<Vec<_>, _>>()?;
    let tilde = y_tilde_table_from(basis, samples, get)?;
    Ok((tables, tilde))
}

/// Elements the directional and tilde tables read.
fn table_elements(basis: &OrderedBasisC, depth: u32) -> Result<BTreeSet<usize>, ChebyError> {
    let mut needed: BTreeSet<usize> = chebyshev::tilde_elements(basis).into_iter().collect();
    for i in 0..basis.d {
        needed.extend(y_elements(basis, i, depth)?);
    }
    Ok(needed)
}

pub fn run_cheby(prep: &Prepared) -> Result<ChebyRun, RunError> {
    let values = prep.compact.evaluate(&prep.basis);
    cheby_with(prep, &values, None)
}

/// Chebyshev stage on `values`, reusing already solved elements.
fn cheby_with(prep: &Prepared, values: &BasisValues, solved: Option<&BTreeMap<usize, MinimaxSolution>>) -> Result<ChebyRun, RunError> {
    let basis = &prep.basis;
    let Some(depth) = prep.depth() else {
        return Err(ChebyError::Depth { need: basis.t, have: basis.s_max }.into());
    };
    let needed = table_elements(basis, depth)?;
    let own;
    let solved = match solved {
        Some(s) if needed.iter().all(|j| s.contains_key(j)) => s,
        _ => {
            own = prep.solve(values, &needed)?;
            &own
        }
    };
    let (tables, tilde) = tables_from(basis, depth, values.npoints(), solved)?;
    let principal = if depth >= 1 { tables.iter().map(principal_constant).collect::<Result<Vec<_>, _>>()? } else { Vec::new() };
    let degree_means = tables
        .iter()
        .map(|tb| (basis.t.max(1)..=basis.s_max).map(|s| t_s_lambda(tb, basis, s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let checks = cheby_checks(prep, values, &tables, &tilde)?;
    Ok(ChebyRun { tables, tilde, principal, degree_means, checks })
}

fn cheby_checks(prep: &Prepared, values: &BasisValues, tables: &[ChebyshevTable], tilde: &ChebyshevTable) -> Result<Vec<Check>, RunError> {
    let basis = &prep.basis;
    let r = prep.compact.r;
    let lp_tol = prep.config.lp.tol;
    let mut checks = Vec::new();
    for tb in tables {
        let chebyshev::TableKind::Directional(i) = tb.kind else { continue };
        // slack 10·tol plus the largest measured LP gap in the table
        let slack = 10.0 * lp_tol + tb.max_gap();
        let v = submult_property_test(tb, slack);
        checks.push(Check::new(
            format!("cheby.submult.i{}", i + 1),
            v.is_empty(),
            format!("{} violating pairs, slack {}", v.len(), num(slack)),
        ));
        let j0 = tb.entries[&varcap_core::polycore::MultiIndex::zero(tb.nvars)].element;
        let bv_norm = values.col(j0).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let g = growth_violations(tb, r, bv_norm, 1e-6);
        checks.push(Check::new(format!("cheby.growth.i{}", i + 1), g.is_empty(), format!("{} entries above r^|α|·‖bv‖ (r = {})", g.len(), num(r))));
    }
    if !tilde.entries.is_empty() {
        let v = tilde_ceiling_violations(tilde, r, 1e-6);
        let detail = format!("{} entries above r^|α'| (r = {})", v.len(), num(r));
        checks.push(if r >= 1.0 { Check::new("cheby.tilde_ceiling", v.is_empty(), detail) } else { Check::diagnostic("cheby.tilde_ceiling", v.is_empty(), detail) });
    }
    if basis.m >= 2 && !tilde.entries.is_empty() {
        let mut nonzero = vec![false; basis.d];
        for beta in relevant_betas(basis) {
            let exp = expand_in_bv(basis, &prep.bundle, &beta)?;
            for (i, c) in exp.c.iter().enumerate() {
                nonzero[i] |= !c.is_zero();
            }
        }
        let mut theta = vec![0.0; basis.m - 1];
        theta[0] = 1.0;
        for row in tilde_directional_diagnostic(tables, tilde, &nonzero, &theta, 0.05)? {
            checks.push(Check::diagnostic(
                format!("cheby.tilde_vs_directional.i{}", row.i + 1),
                row.holds || !row.applies,
                format!("T^- ≈ {} vs T̃^- ≈ {} (asserted: {})", num(row.directional), num(row.tilde), row.applies),
            ));
        }
    }
    Ok(checks)
}

pub fn table_csv(tb: &ChebyshevTable) -> Csv {
    let idx = match tb.kind {
        chebyshev::TableKind::Directional(i) => (i + 1).to_string(),
        chebyshev::TableKind::Tilde => "tilde".to_string(),
    };
    let mut header = vec!["i".to_string()];
    header.extend((1..=tb.nvars).map(|k| format!("a{k}")));
    header.extend(["Y", "lower", "gap", "element", "degree", "solver_status"].map(String::from));
    let mut csv = Csv::new(header);
    for (a, e) in &tb.entries {
        let mut row = vec![idx.clone()];
        row.extend(a.exps().iter().map(|x| x.to_string()));
        row.extend([
            num(e.value),
            num(e.lower),
            num(e.gap()),
            e.element.to_string(),
            e.degree.to_string(),
            (if e.real { "ok_real" } else { "ok" }).to_string(),
        ]);
        csv.push(row);
    }
    csv
}

pub fn principal_csv(principal: &[PrincipalEstimate]) -> Csv {
    let mut csv = Csv::new(["i", "s", "log_avg", "estimate", "slope"]);
    for (i, p) in principal.iter().enumerate() {
        for (s, v) in &p.series {
            csv.push(vec![(i + 1).to_string(), s.to_string(), num(*v), num(v.exp()), num(p.slope)]);
        }
    }
    csv
}

pub fn degree_mean_csv(means: &[Vec<DegreeMean>]) -> Csv {
    let mut csv = Csv::new(["i", "s", "T_s", "zeros"]);
    for (i, row) in means.iter().enumerate() {
        for dm in row {
            csv.push(vec![(i + 1).to_string(), dm.s.to_string(), num(dm.value), dm.zeros.to_string()]);
        }
    }
    csv
}

pub struct DiameterRun {
    pub cheby: ChebyRun,
    pub candidates: SampledCompact,
    pub series: DiameterSeries,
    pub product: ProductReport,
    pub sandwich: Option<SandwichReport>,
    pub ratio: Option<StdRatioReport>,
    pub checks: Vec<Check>,
}

pub fn run_diameter(prep: &Prepared) -> Result<DiameterRun, RunError> {
    let cfg = &prep.config;
    let basis = &prep.basis;
    let candidates = prep.candidates()?;
    let values = candidates.evaluate(basis);
    // the sandwich needs every element on the candidates; when those are
    // the compact samples, the Chebyshev stage reuses the same solves
    let all_solved = if cfg.search.sandwich {
        Some(prep.solve(&values, &(0..basis.len()).collect())?)
    } else {
        None
    };
    let cheby = match &all_solved {
        Some(solved) if candidates.points == prep.compact.points => cheby_with(prep, &values, Some(solved))?,
        _ => run_cheby(prep)?,
    };
    let std_values = cfg
        .search
        .std_basis
        .then(|| BasisValues::new(&standard_basis_polys(&prep.bundle.ctx, cfg.s_max), &candidates.points));
    let seed = cfg.search_seed();
    let series = diameter_series(basis, &values, std_values.as_ref(), cfg.s_max, seed, cfg.search.sweeps);
    let product = product_formula_compare(&series, &cheby.principal, basis.t);

    let mut checks = count_checks(basis, &prep.bundle);
    if let Some(e) = &series.stopped {
        checks.push(Check::diagnostic("fekete.search", false, format!("search stopped: {e}")));
    }
    let sandwich = if cfg.search.sandwich {
        let solved = all_solved.as_ref().expect("solved with the sandwich enabled");
        let y: Vec<f64> = (0..basis.len()).map(|j| solved[&j].value).collect();
        let (tables, tilde) = tables_from(basis, prep.depth().unwrap_or(0), values.npoints(), solved)?;
        let lp_gap = solved.values().map(|s| if s.value > 0.0 { (s.value - s.lower).max(0.0) / s.value } else { 0.0 }).fold(0.0, f64::max);
        let report = sandwich_check(basis, &series, &y, &tables, Some(&tilde), candidates.r, cfg.search.sandwich_slack);
        let failed = report.rows.iter().filter(|r| !r.pass).count();
        let worst = report.worst_margin();
        checks.push(Check::new(
            "fekete.sandwich",
            report.rows.iter().all(|r| r.pass),
            format!(
                "{} one-step rows, {} failed, {} skipped; worst log-margin {}, required slack {}, allowed {}, LP gap {}",
                report.rows.len(),
                failed,
                report.skipped,
                num(worst),
                num(required_slack(worst)),
                num(cfg.search.sandwich_slack),
                num(lp_gap)
            ),
        ));
        let bad_blocks = report.blocks.iter().filter(|b| !b.pass).count();
        checks.push(Check::new("fekete.sandwich_blocks", bad_blocks == 0, format!("{} degree blocks, {} failed", report.blocks.len(), bad_blocks)));
        Some(report)
    } else {
        None
    };
    let ratio = std_values.as_ref().map(|sv| std_basis_ratio(basis, &prep.bundle, &series, &values, sv, cfg.search.random_configs, seed));
    if let Some(rr) = &ratio {
        let held = rr.rows.iter().all(|r| r.holds);
        let detail = match &rr.minors {
            Some(mb) => format!("c = {}, C = {} ({} minors{}), {} degrees", num(mb.c), num(mb.big_c), mb.minors.len(), if mb.sampled { ", sampled" } else { "" }, rr.rows.len()),
            None => "no nonsingular minors".to_string(),
        };
        checks.push(if rr.normal_form_products { Check::new("fekete.minor_bound", held, detail) } else { Check::diagnostic("fekete.minor_bound", held, detail + " (products not normal forms)") });
        checks.push(Check::new(
            "fekete.constant_ratio",
            rr.variance < 1e-10 && rr.configurations > 0,
            format!("variance {} over {} configurations", num(rr.variance), rr.configurations),
        ));
        if let Some(g) = rr.top_gap {
            checks.push(Check::diagnostic("fekete.std_gap", g <= 0.02, format!("|d_s(V) − d_s(W)|/d_s(W) = {} at s = {}", num(g), cfg.s_max)));
        }
    }
    if let Some(last) = product.last() {
        checks.push(Check::diagnostic(
            "product.delta",
            last.delta <= 0.05,
            format!("Δ({}) = {}, non-increasing over last 4: {}", last.s, num(last.delta), product.non_increasing_tail(4)),
        ));
    } else if product.degenerate {
        checks.push(Check::diagnostic("product.delta", true, "degenerate (d(K) = 0 branch)"));
    }
    Ok(DiameterRun { cheby, candidates, series, product, sandwich, ratio, checks })
}

/// Multiplicative slack needed to absorb a (negative) log margin.
pub fn required_slack(worst_log_margin: f64) -> f64 {
    if worst_log_margin >= 0.0 {
        0.0
    } else {
        (-worst_log_margin).exp() - 1.0
    }
}

pub fn series_csv(series: &DiameterSeries, product: &ProductReport) -> Csv {
    let mut csv = Csv::new(["s", "h_s", "m_s", "l_s", "logV", "d_s", "logW", "d_s_std", "delta_product_formula"]);
    for r in &series.rows {
        let delta = product.rows.iter().find(|p| p.s == r.s).map(|p| p.delta);
        csv.push(vec![
            r.s.to_string(),
            r.h_s.to_string(),
            r.m_s.to_string(),
            r.l_s.to_string(),
            num(r.log_v),
            num(r.d_s),
            opt_num(r.log_w),
            opt_num(r.d_s_std),
            opt_num(delta),
        ]);
    }
    csv
}

pub fn points_csv(candidates: &SampledCompact, config: &[usize]) -> Csv {
    let n = candidates.points.first().map_or(0, |p| p.len());
    let mut header = vec!["row".to_string(), "candidate".to_string()];
    for k in 1..=n {
        header.push(format!("re_z{k}"));
        header.push(format!("im_z{k}"));
    }
    let mut csv = Csv::new(header);
    for (row, &c) in config.iter().enumerate() {
        let mut line = vec![row.to_string(), c.to_string()];
        for z in &candidates.points[c] {
            line.push(num(z.re));
            line.push(num(z.im));
        }
        csv.push(line);
    }
    csv
}

pub fn product_csv(product: &ProductReport) -> Csv {
    let mut csv = Csv::new(["s", "log_d_s", "mean_log_T", "delta"]);
    for r in &product.rows {
        csv.push(vec![r.s.to_string(), num(r.log_d), num(r.log_t), num(r.delta)]);
    }
    csv
}

pub fn sandwich_csv(report: &SandwichReport, basis: &OrderedBasisC) -> (Csv, Csv) {
    let mut rows = Csv::new(["j", "degree", "kind", "Y", "log_ratio", "lower_margin", "upper_margin", "pass"]);
    for r in &report.rows {
        let kind = match &basis.elements[r.element].kind {
            ElementKind::Star { .. } => "*",
            ElementKind::StarStar { .. } => "**",
        };
        rows.push(vec![
            (r.element + 1).to_string(),
            r.degree.to_string(),
            kind.to_string(),
            num(r.y),
            opt_num(r.log_ratio),
            num(r.lower_margin),
            num(r.upper_margin),
            r.pass.to_string(),
        ]);
    }
    let mut blocks = Csv::new(["s", "a_s", "lower_elements", "lower_tilde", "middle", "upper", "pass"]);
    for b in &report.blocks {
        blocks.push(vec![
            b.s.to_string(),
            b.a_s.to_string(),
            num(b.lower_elements),
            opt_num(b.lower_tilde),
            num(b.middle),
            num(b.upper),
            b.pass.to_string(),
        ]);
    }
    (rows, blocks)
}

pub fn ratio_csv(report: &StdRatioReport) -> Csv {
    let mut csv = Csv::new(["tau", "b_tau", "log_vdm_C_minus_std", "bound", "holds"]);
    for r in &report.rows {
        csv.push(vec![r.tau.to_string(), r.b_tau.to_string(), num(r.diff), num(r.bound), r.holds.to_string()]);
    }
    csv
}
