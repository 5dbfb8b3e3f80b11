use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use recur::burst::PeakParams;
use recur::predict::ForestConfig;
use recur::simulate::{SimConfig, SweepKind};

use crate::error::{CliError, CliResult};

/// Parses TOML, or JSON when the file ends in `.json`.
pub fn parse_config<T: DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let parsed = if is_json {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        toml::from_str(text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub base: SimConfig,
    /// `p0` values for a virality sweep, copy counts for a copy-count sweep.
    pub grid: Vec<f64>,
    /// Read a virality grid as multiples of the epidemic threshold.
    #[serde(default)]
    pub relative_to_threshold: bool,
    pub reps: usize,
    #[serde(default)]
    pub detector: PeakParams,
}

impl SweepConfig {
    pub fn copy_grid(&self) -> CliResult<Vec<u32>> {
        self.grid
            .iter()
            .map(|&m| {
                if m >= 1.0 && m.fract() == 0.0 && m <= u32::MAX as f64 {
                    Ok(m as u32)
                } else {
                    Err(CliError::Validation(format!("copy count {m} is not a positive integer")))
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub detector: PeakParams,
    /// Series length in days; defaults to one past each cluster's last event.
    pub horizon: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictConfig {
    pub detector: PeakParams,
    pub horizon: Option<usize>,
    pub folds: usize,
    pub forest: ForestConfig,
    pub logistic_l2: f64,
    pub logistic_iterations: usize,
    /// Seeds class balancing and fold assignment.
    pub rng_seed: u64,
}

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig {
            detector: PeakParams::default(),
            horizon: None,
            folds: 10,
            forest: ForestConfig::default(),
            logistic_l2: 1e-3,
            logistic_iterations: 500,
            rng_seed: 0,
        }
    }
}
