//! Experiment configuration.
//!
//! ```json
//! {
//!   "model": {"d": 300, "beta_stat": {"norm_sq": 1.0, "direction": "e1"},
//!             "sigma_stat_sq": 1.0, "zeta": 0.25, "eta": 0.0},
//!   "gamma_grid": [0.1, 0.3, 0.5, 0.9, 1.1, 1.5, 2, 3, 10],
//!   "lambda_grid": [0.01, 0.1, 0.5, 1, 5, 50],
//!   "d": 300, "replicates": 20, "mc_samples": 2000, "seed": 42,
//!   "outputs": "out"
//! }
//! ```

use std::path::{Path, PathBuf};

use confounded_ridge::model::{BetaStatSpec, Direction, ModelSpec};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const STANDARD_GAMMAS: [f64; 9] = [0.1, 0.3, 0.5, 0.9, 1.1, 1.5, 2.0, 3.0, 10.0];
pub const STANDARD_LAMBDAS: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 5.0, 50.0];
pub const DEFAULT_ZETAS: [f64; 10] = [-3.0, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9, 1.0, 1.5];
/// Confounding strengths of the three min-norm regimes at `snr_stat = 1`.
pub const FIGURE2_ZETAS: [f64; 3] = [-0.5, 0.25, 0.75];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub gamma_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    /// Covariate dimension of the finite-sample experiments.
    pub d: usize,
    pub replicates: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub outputs: PathBuf,
    /// Rows of the optimal-penalty table.
    #[serde(default = "default_zetas")]
    pub zeta_grid: Vec<f64>,
    #[serde(default = "default_figure2_zetas")]
    pub figure2_zetas: Vec<f64>,
    /// Sample size for `simulate`; defaults to `round(d / gamma_grid[0])`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

fn default_zetas() -> Vec<f64> {
    DEFAULT_ZETAS.to_vec()
}

fn default_figure2_zetas() -> Vec<f64> {
    FIGURE2_ZETAS.to_vec()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec {
                d: 300,
                beta_stat: BetaStatSpec::Norm { norm_sq: 1.0, direction: Direction::E1 },
                sigma_stat_sq: 1.0,
                zeta: 0.25,
                eta: 0.0,
            },
            gamma_grid: STANDARD_GAMMAS.to_vec(),
            lambda_grid: STANDARD_LAMBDAS.to_vec(),
            d: 300,
            replicates: 20,
            mc_samples: 2000,
            seed: 42,
            outputs: PathBuf::from("out"),
            zeta_grid: default_zetas(),
            figure2_zetas: default_figure2_zetas(),
            n: None,
        }
    }
}

fn check_grid(name: &str, grid: &[f64], positive: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(HarnessError::Config(format!("{name} must not be empty")));
    }
    for &v in grid {
        if !v.is_finite() || (positive && v <= 0.0) {
            let kind = if positive { "positive and finite" } else { "finite" };
            return Err(HarnessError::Config(format!("{name} entries must be {kind}, got {v}")));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        check_grid("gamma_grid", &self.gamma_grid, true)?;
        check_grid("lambda_grid", &self.lambda_grid, true)?;
        check_grid("zeta_grid", &self.zeta_grid, false)?;
        check_grid("figure2_zetas", &self.figure2_zetas, false)?;
        if self.d < 2 {
            return Err(HarnessError::Config(format!("d must be at least 2, got {}", self.d)));
        }
        if self.replicates < 1 {
            return Err(HarnessError::Config("replicates must be at least 1".into()));
        }
        if self.mc_samples < 2 {
            return Err(HarnessError::Config(format!("mc_samples must be at least 2, got {}", self.mc_samples)));
        }
        if self.n == Some(0) {
            return Err(HarnessError::Config("n must be positive".into()));
        }
        Ok(())
    }

    /// The model spec at the experiment dimension `d`.
    pub fn model_at_d(&self) -> Result<ModelSpec> {
        Ok(self.model.at_dimension(self.d)?)
    }

    pub fn simulate_n(&self) -> usize {
        self.n.unwrap_or_else(|| sample_size(self.d, self.gamma_grid[0]))
    }
}

/// `n = round(d / gamma)`, at least 2.
pub fn sample_size(d: usize, gamma: f64) -> usize {
    ((d as f64 / gamma).round() as usize).max(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_json() {
        let config = ExperimentConfig::default();
        let text = serde_json::to_string(&config).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), config);
    }

    #[test]
    fn rejects_bad_fields() {
        let good = serde_json::to_value(ExperimentConfig::default()).unwrap();
        let bad = |key: &str, value: serde_json::Value| {
            let mut v = good.clone();
            v[key] = value;
            ExperimentConfig::from_json(&v.to_string()).unwrap_err()
        };
        assert!(matches!(bad("d", 1.into()), HarnessError::Config(_)));
        assert!(matches!(bad("replicates", 0.into()), HarnessError::Config(_)));
        assert!(matches!(bad("gamma_grid", serde_json::json!([])), HarnessError::Config(_)));
        assert!(matches!(bad("lambda_grid", serde_json::json!([0.1, -1.0])), HarnessError::Config(_)));
        assert!(matches!(bad("unknown", 1.into()), HarnessError::Config(_)));
    }

    #[test]
    fn sample_size_rounds_and_floors() {
        assert_eq!(sample_size(300, 0.7), 429);
        assert_eq!(sample_size(300, 3.0), 100);
        assert_eq!(sample_size(2, 10.0), 2);
    }
}
