//! Run configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use varcap_core::lp::MinimaxOptions;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompactKind {
    Circle,
    Interval,
    RealSphere,
    Torus,
    PointList,
}

/// The compact set `K`. Which optional fields apply depends on `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactSpec {
    pub kind: CompactKind,
    /// Sample count (per circle for `torus`).
    #[serde(default)]
    pub samples: usize,
    /// 1-based coordinate carrying a circle or interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinate: Option<usize>,
    /// 1-based coordinates of the torus factors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// JSON point list, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpSettings {
    #[serde(default = "default_phases")]
    pub phases: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_phases() -> usize {
    32
}

fn default_tol() -> f64 {
    1e-9
}

impl Default for LpSettings {
    fn default() -> Self {
        Self { phases: default_phases(), tol: default_tol() }
    }
}

impl LpSettings {
    pub fn options(&self) -> MinimaxOptions {
        MinimaxOptions { phases: self.phases, tol: self.tol, ..MinimaxOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSettings {
    /// Candidate count for the Fekete search; defaults to `compact.samples`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
    /// Defaults to the run seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Also search in the standard-monomial basis.
    #[serde(default)]
    pub std_basis: bool,
    /// Run the one-step sandwich check (minimax on the candidate set).
    #[serde(default)]
    pub sandwich: bool,
    /// Allowed multiplicative slack on the one-step sandwich inequalities.
    #[serde(default = "default_slack")]
    pub sandwich_slack: f64,
    /// Random configurations for the constant-ratio check.
    #[serde(default = "default_configs")]
    pub random_configs: usize,
}

fn default_sweeps() -> usize {
    2
}

fn default_slack() -> f64 {
    0.05
}

fn default_configs() -> usize {
    20
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self { candidates: None, sweeps: default_sweeps(), seed: None, std_basis: false, sandwich: false, sandwich_slack: default_slack(), random_configs: default_configs() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Variety JSON file, relative to the config file.
    pub variety: PathBuf,
    pub s_max: u32,
    pub seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    pub compact: CompactSpec,
    #[serde(default)]
    pub lp: LpSettings,
    #[serde(default)]
    pub search: SearchSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_threads() -> usize {
    1
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config; returns it with its directory.
    pub fn load(path: &Path) -> Result<(Self, PathBuf), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let cfg = Self::from_toml_str(&text)?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, dir))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn search_seed(&self) -> u64 {
        self.search.seed.unwrap_or(self.seed)
    }

    pub fn candidate_count(&self) -> usize {
        self.search.candidates.unwrap_or(self.compact.samples)
    }

    /// Replaces every seed in the config.
    pub fn override_seed(&mut self, seed: u64) {
        self.seed = seed;
        if self.search.seed.is_some() {
            self.search.seed = Some(seed);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |field, reason: &str| Err(ConfigError::Invalid { field, reason: reason.to_string() });
        if self.threads == 0 {
            return invalid("threads", "must be at least 1");
        }
        if self.lp.phases < 2 {
            return invalid("lp.phases", "must be at least 2");
        }
        if !(self.lp.tol > 0.0) {
            return invalid("lp.tol", "must be positive");
        }
        let c = &self.compact;
        let needs_samples = c.kind != CompactKind::PointList;
        if needs_samples && c.samples == 0 {
            return invalid("compact.samples", "must be positive");
        }
        match c.kind {
            CompactKind::Circle | CompactKind::Interval => {
                if c.coordinate.is_none_or(|k| k == 0) {
                    return invalid("compact.coordinate", "a 1-based coordinate is required");
                }
            }
            CompactKind::Torus => {
                if c.coordinates.as_ref().is_none_or(|v| v.is_empty() || v.contains(&0)) {
                    return invalid("compact.coordinates", "a nonempty list of 1-based coordinates is required");
                }
            }
            CompactKind::PointList => {
                if c.path.is_none() {
                    return invalid("compact.path", "required for point_list");
                }
            }
            CompactKind::RealSphere => {}
        }
        if c.kind == CompactKind::Interval {
            let (a, b) = (c.a.unwrap_or(-1.0), c.b.unwrap_or(1.0));
            if !(a < b) {
                return invalid("compact.a", "interval needs a < b");
            }
        }
        if c.radius.is_some_and(|r| !(r > 0.0)) {
            return invalid("compact.radius", "must be positive");
        }
        if !(self.search.sandwich_slack >= 0.0) {
            return invalid("search.sandwich_slack", "must be non-negative");
        }
        if self.search.candidates == Some(0) {
            return invalid("search.candidates", "must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
variety = "line.json"
s_max = 8
seed = 11

[compact]
kind = "circle"
samples = 512
coordinate = 1

[search]
candidates = 720
sweeps = 3
std_basis = true
"#;

    #[test]
    fn round_trip() {
        let cfg = RunConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.candidate_count(), 720);
        assert_eq!(cfg.lp, LpSettings::default());
        let again = RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn unknown_field_names_line() {
        let bad = SAMPLE.replace("sweeps = 3", "sweps = 3");
        let err = RunConfig::from_toml_str(&bad).unwrap_err().to_string();
        assert!(err.contains("sweps") && err.contains("line"), "{err}");
    }

    #[test]
    fn missing_coordinate_names_field() {
        let bad = SAMPLE.replace("coordinate = 1\n", "");
        let err = RunConfig::from_toml_str(&bad).unwrap_err().to_string();
        assert!(err.contains("compact.coordinate"), "{err}");
    }
}
