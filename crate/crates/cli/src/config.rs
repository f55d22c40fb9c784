//! Experiment configuration: one JSON document per invocation.
//!
//! Every command reads the same schema and validates the fields it needs up
//! front, so precondition violations surface as config errors before any
//! computation starts. Unknown fields are rejected and serialization skips
//! absent fields, so `parse . serialize . parse` is the identity.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use hermite_mc::{SpaceFamily, WeightSequenceSpec};

/// Output encoding. JSON floats use the shortest round-trip encoding;
/// CSV floats carry 12 significant digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputFormat::Json => write!(f, "json"),
            OutputFormat::Csv => write!(f, "csv"),
        }
    }
}

/// One pair of evaluation points for `kernel-eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// The experiment configuration shared by all subcommands.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Space family (dimension-free); combined with `s` or `s_grid`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceFamily>,
    /// Bare weight sequence for `tractability` on the finite-smoothness
    /// conditions, which do not depend on `alpha` or a fixed dimension.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<WeightSequenceSpec>,
    /// Fixed dimension for `error-study` and `kernel-eval`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    /// Dimension grid for `nmc-table` and the tractability diagnostic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_grid: Option<Vec<u64>>,
    /// Node counts for `error-study`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<u64>>,
    /// Replications per error study.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replications: Option<u64>,
    /// Master seed; `--seed` overrides.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    /// Accuracy grid for `nmc-table`, each value in (0, 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_grid: Option<Vec<f64>>,
    /// Kernel truncation tolerance for `kernel-eval`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Evaluation points for `kernel-eval`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point_pairs: Option<Vec<PointPair>>,
    /// Output format; `--format` overrides. Defaults per command.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    /// Output path; `--out` overrides. Defaults to standard output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// A config-level failure; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error<T>(message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(message.into()))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn require_space(&self) -> Result<&SpaceFamily, ConfigError> {
        self.space
            .as_ref()
            .ok_or_else(|| ConfigError("missing field: space".into()))
    }

    pub fn require_s(&self) -> Result<usize, ConfigError> {
        match self.s {
            Some(s) if s >= 1 => Ok(s),
            Some(s) => config_error(format!("s must be >= 1, got {s}")),
            None => config_error("missing field: s"),
        }
    }

    pub fn require_n_values(&self) -> Result<&[u64], ConfigError> {
        match self.n_values.as_deref() {
            Some([]) | None => config_error("missing or empty field: n_values"),
            Some(values) => {
                if values.iter().any(|&n| n < 1) {
                    return config_error("n_values entries must be >= 1");
                }
                Ok(values)
            }
        }
    }

    pub fn require_replications(&self) -> Result<u64, ConfigError> {
        match self.replications {
            Some(r) if r >= 2 => Ok(r),
            Some(r) => config_error(format!("replications must be >= 2, got {r}")),
            None => config_error("missing field: replications"),
        }
    }

    pub fn require_eps_grid(&self) -> Result<&[f64], ConfigError> {
        match self.eps_grid.as_deref() {
            Some([]) | None => config_error("missing or empty field: eps_grid"),
            Some(grid) => {
                for &eps in grid {
                    if !(eps > 0.0 && eps < 1.0) {
                        return config_error(format!("eps {eps} outside (0,1)"));
                    }
                }
                Ok(grid)
            }
        }
    }

    pub fn require_tol(&self) -> Result<f64, ConfigError> {
        match self.tol {
            Some(tol) if tol.is_finite() && tol > 0.0 => Ok(tol),
            Some(tol) => config_error(format!("tol must be > 0, got {tol}")),
            None => config_error("missing field: tol"),
        }
    }

    pub fn require_point_pairs(&self, s: usize) -> Result<&[PointPair], ConfigError> {
        match self.point_pairs.as_deref() {
            Some([]) | None => config_error("missing or empty field: point_pairs"),
            Some(pairs) => {
                for (i, pair) in pairs.iter().enumerate() {
                    if pair.x.len() != s || pair.y.len() != s {
                        return config_error(format!(
                            "point pair {i} does not match dimension {s}"
                        ));
                    }
                    if pair.x.iter().chain(&pair.y).any(|c| !c.is_finite()) {
                        return config_error(format!("point pair {i} has non-finite coordinates"));
                    }
                }
                Ok(pairs)
            }
        }
    }

    /// Dimension grid, defaulting to the dyadic diagnostic grid.
    pub fn s_grid_or_dyadic(&self) -> Result<Vec<u64>, ConfigError> {
        match self.s_grid.as_deref() {
            None => Ok(hermite_mc::tractability::dyadic_grid()),
            Some([]) => config_error("s_grid must be nonempty when present"),
            Some(grid) => {
                if grid.iter().any(|&s| s < 1) {
                    return config_error("s_grid entries must be >= 1");
                }
                Ok(grid.to_vec())
            }
        }
    }

    pub fn master_seed_or(&self, override_seed: Option<u64>) -> Result<u64, ConfigError> {
        override_seed
            .or(self.master_seed)
            .ok_or_else(|| ConfigError("missing field: master_seed (or pass --seed)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_error_study_config_parses() {
        let text = r#"{
            "space": {"family": "finite_smoothness", "alpha": 2.0,
                      "gamma": {"kind": "table", "values": [0.9, 0.5], "tail": "constant_last"}},
            "s": 2, "n_values": [100], "replications": 100, "master_seed": 42
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.require_s().unwrap(), 2);
        assert_eq!(cfg.require_replications().unwrap(), 100);
        cfg.require_space().unwrap();
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn roundtrip_is_identity() {
        let text = r#"{
            "space": {"family": "analytic", "omega": 0.5,
                      "a": {"kind": "table", "values": [2.0, 1.0], "tail": "constant_last"},
                      "b": {"kind": "table", "values": [1.0, 3.0], "tail": "constant_last"}},
            "s": 2, "n_values": [1000], "replications": 10000,
            "master_seed": 42, "format": "csv"
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let cfg2 = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, cfg2);
    }

    #[test]
    fn validation_messages() {
        let cfg = ExperimentConfig {
            replications: Some(1),
            ..Default::default()
        };
        assert!(cfg.require_replications().is_err());
        assert!(cfg.require_space().is_err());
        assert!(cfg.master_seed_or(Some(7)).unwrap() == 7);
    }

    #[test]
    fn shipped_configs_roundtrip() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let mut checked = 0;
        for entry in std::fs::read_dir(dir).expect("configs directory exists") {
            let path = entry.unwrap().path();
            if path.extension().map(|e| e == "json") != Some(true) {
                continue;
            }
            let text = std::fs::read_to_string(&path).unwrap();
            let cfg = ExperimentConfig::from_json(&text)
                .unwrap_or_else(|e| panic!("{} does not parse: {e}", path.display()));
            let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
            assert_eq!(cfg, again, "round trip changed {}", path.display());
            checked += 1;
        }
        assert!(checked >= 5, "expected the shipped example configs, found {checked}");
    }
}
