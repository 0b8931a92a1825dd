use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use varcap::config::RunConfig;
use varcap::pipeline::{
    self, degree_mean_csv, points_csv, prepare, principal_csv, product_csv, ratio_csv, run_basis, run_cheby, run_diameter, sandwich_csv,
    series_csv, table_csv, Prepared, RunError,
};
use varcap::report::{all_pass, summary, Check};
use varcap::suites::{limits_checks, line_fixture_checks, sphere_fixture_checks};

#[derive(Parser, Debug)]
#[command(name = "varcap", version, about = "Ordered bases, Chebyshev constants and transfinite diameters on affine varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; overrides the config's `threads`.
    #[arg(long)]
    threads: Option<usize>,
    /// Replaces every seed in the config.
    #[arg(long)]
    seed_override: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump the ordered basis and its counts.
    Basis(Common),
    /// Chebyshev tables, degree means and principal constants.
    Cheby(Common),
    /// Fekete search, diameter series and the comparisons built on it.
    Diameter(Common),
    /// Exact fixtures plus the invariant suites for the configured variety.
    Verify(Common),
    /// Synthetic-oracle suite for the limit machinery.
    Limits(Common),
}

const EXIT_INVARIANT: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn load(common: &Common) -> Result<Option<(RunConfig, PathBuf)>, RunError> {
    let Some(path) = &common.config else { return Ok(None) };
    let (mut cfg, dir) = RunConfig::load(path)?;
    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    if let Some(s) = common.seed_override {
        cfg.override_seed(s);
    }
    cfg.validate()?;
    Ok(Some((cfg, dir)))
}

fn out_dir(common: &Common, cfg: Option<&RunConfig>, base: &Path) -> Result<PathBuf, RunError> {
    let dir = match (&common.out, cfg.and_then(|c| c.out.as_ref())) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => base.join(d),
        (None, None) => PathBuf::from("out"),
    };
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn require(common: &Common) -> Result<(Prepared, PathBuf), RunError> {
    let Some((cfg, base)) = load(common)? else {
        return Err(RunError::Config(varcap::config::ConfigError::Invalid { field: "--config", reason: "this subcommand needs a config file".into() }));
    };
    let out = out_dir(common, Some(&cfg), &base)?;
    Ok((prepare(&cfg, &base)?, out))
}

fn finish(out: &Path, checks: &[Check]) -> Result<bool, RunError> {
    let text = summary(checks);
    std::fs::write(out.join("summary.txt"), &text)?;
    print!("{text}");
    Ok(all_pass(checks))
}

fn cmd_basis(common: &Common) -> Result<bool, RunError> {
    let (prep, out) = require(common)?;
    let run = run_basis(&prep);
    std::fs::write(out.join("basis.tsv"), &run.dump)?;
    run.counts.write(&out, "counts.csv")?;
    finish(&out, &run.checks)
}

fn write_cheby(out: &Path, run: &pipeline::ChebyRun) -> Result<(), RunError> {
    for tb in &run.tables {
        if let varcap_core::chebyshev::TableKind::Directional(i) = tb.kind {
            table_csv(tb).write(out, &format!("y_i{}.csv", i + 1))?;
        }
    }
    table_csv(&run.tilde).write(out, "y_tilde.csv")?;
    principal_csv(&run.principal).write(out, "principal.csv")?;
    degree_mean_csv(&run.degree_means).write(out, "t_s.csv")?;
    Ok(())
}

fn cmd_cheby(common: &Common) -> Result<bool, RunError> {
    let (prep, out) = require(common)?;
    let run = run_cheby(&prep)?;
    write_cheby(&out, &run)?;
    finish(&out, &run.checks)
}

fn cmd_diameter(common: &Common) -> Result<bool, RunError> {
    let (prep, out) = require(common)?;
    let run = run_diameter(&prep)?;
    write_cheby(&out, &run.cheby)?;
    series_csv(&run.series, &run.product).write(&out, "series.csv")?;
    product_csv(&run.product).write(&out, "product.csv")?;
    if let Some(last) = run.series.rows.iter().rev().find(|r| !r.config.is_empty()) {
        points_csv(&run.candidates, &last.config).write(&out, "fekete_points.csv")?;
    }
    if let Some(sw) = &run.sandwich {
        let (rows, blocks) = sandwich_csv(sw, &prep.basis);
        rows.write(&out, "sandwich.csv")?;
        blocks.write(&out, "sandwich_blocks.csv")?;
    }
    if let Some(rr) = &run.ratio {
        ratio_csv(rr).write(&out, "std_ratio.csv")?;
    }
    let mut checks = run.checks.clone();
    checks.extend(run.cheby.checks.iter().cloned());
    finish(&out, &checks)
}

fn cmd_verify(common: &Common) -> Result<bool, RunError> {
    let loaded = load(common)?;
    let base = loaded.as_ref().map(|(_, d)| d.clone()).unwrap_or_default();
    let out = out_dir(common, loaded.as_ref().map(|(c, _)| c), &base)?;
    let mut checks = sphere_fixture_checks();
    checks.extend(line_fixture_checks());
    if let Some((cfg, base)) = &loaded {
        let prep = prepare(cfg, base)?;
        checks.extend(run_basis(&prep).checks);
        checks.extend(run_cheby(&prep)?.checks);
    }
    finish(&out, &checks)
}

fn cmd_limits(common: &Common) -> Result<bool, RunError> {
    let loaded = load(common)?;
    let base = loaded.as_ref().map(|(_, d)| d.clone()).unwrap_or_default();
    let out = out_dir(common, loaded.as_ref().map(|(c, _)| c), &base)?;
    let seed = loaded.as_ref().map_or(common.seed_override.unwrap_or(0), |(c, _)| c.seed);
    let (checks, csv) = limits_checks(seed);
    csv.write(&out, "limits.csv")?;
    finish(&out, &checks)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Basis(c) => cmd_basis(c),
        Command::Cheby(c) => cmd_cheby(c),
        Command::Diameter(c) => cmd_diameter(c),
        Command::Verify(c) => cmd_verify(c),
        Command::Limits(c) => cmd_limits(c),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_INVARIANT),
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code() as u8;
            ExitCode::from(if code == 0 { EXIT_CONFIG } else { code })
        }
    }
}
