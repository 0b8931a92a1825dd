//! Pass/fail lines and CSV output.

use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    /// Diagnostics are reported but never fail a run.
    pub enforced: bool,
    pub detail: String,
}

impl Check {
    pub fn new(id: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { id: id.into(), pass, enforced: true, detail: detail.into() }
    }

    pub fn diagnostic(id: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { id: id.into(), pass, enforced: false, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        let tag = match (self.enforced, self.pass) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, true) => "NOTE",
            (false, false) => "WARN",
        };
        format!("{tag} {}: {}", self.id, self.detail)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass || !c.enforced)
}

pub fn summary(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        let _ = writeln!(out, "{}", c.line());
    }
    let enforced = checks.iter().filter(|c| c.enforced).count();
    let failed = checks.iter().filter(|c| c.enforced && !c.pass).count();
    let _ = writeln!(out, "{} checks, {} failed, {} diagnostics", enforced, failed, checks.len() - enforced);
    out
}

/// Shortest round-trip decimal; `inf`/`-inf`/`NaN` spelled out.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "csv row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path, name: &str) -> std::io::Result<()> {
        std::fs::write(dir.join(name), self.render())
    }
}
