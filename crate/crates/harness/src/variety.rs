//! Variety description files (JSON).

use std::path::Path;

use serde::{Deserialize, Serialize};
use varcap_core::infinitybasis::VarietySpec;
use varcap_core::polycore::{parse_gauss_rational, parse_polynomial};

#[derive(Debug, thiserror::Error)]
pub enum VarietyError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("variety file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("generator {index}: {reason}")]
    Generator { index: usize, reason: String },
    #[error("point at infinity {index}: {reason}")]
    Point { index: usize, reason: String },
}

/// `{"n": 3, "m": 2, "generators": ["z1^2 + z2^2 + z3^2 - 1"]}`, with
/// optional `radical_asserted` and `points_at_infinity` (coordinates as
/// Gaussian-rational strings, `[z0 : z1 : … : zn]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub n: usize,
    pub m: usize,
    pub generators: Vec<String>,
    #[serde(default)]
    pub radical_asserted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_at_infinity: Option<Vec<Vec<String>>>,
}

impl VarietyFile {
    pub fn load(path: &Path) -> Result<Self, VarietyError> {
        let text = std::fs::read_to_string(path).map_err(|source| VarietyError::Io { path: path.display().to_string(), source })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_spec(&self) -> Result<VarietySpec, VarietyError> {
        let generators = self
            .generators
            .iter()
            .enumerate()
            .map(|(index, g)| parse_polynomial(g, self.n).map_err(|e| VarietyError::Generator { index, reason: e.to_string() }))
            .collect::<Result<Vec<_>, _>>()?;
        let points_at_infinity = match &self.points_at_infinity {
            None => None,
            Some(pts) => Some(
                pts.iter()
                    .enumerate()
                    .map(|(index, p)| {
                        p.iter()
                            .map(|c| parse_gauss_rational(c).map_err(|e| VarietyError::Point { index, reason: e.to_string() }))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        Ok(VarietySpec { n: self.n, m: self.m, generators, radical_asserted: self.radical_asserted, points_at_infinity })
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.generators.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sphere() {
        let f: VarietyFile = serde_json::from_str(r#"{"n":3,"m":2,"generators":["z1^2+z2^2+z3^2-1"]}"#).unwrap();
        let spec = f.to_spec().unwrap();
        assert_eq!(spec.generators.len(), 1);
        assert!(spec.points_at_infinity.is_none());
    }

    #[test]
    fn bad_generator_is_reported() {
        let f: VarietyFile = serde_json::from_str(r#"{"n":2,"m":1,"generators":["z3"]}"#).unwrap();
        assert!(matches!(f.to_spec(), Err(VarietyError::Generator { index: 0, .. })));
    }
}
