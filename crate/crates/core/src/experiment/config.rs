use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Sweep,
    Gnm,
    TrajectoryCompare,
    WalkVsPeel,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Sweep => "sweep",
            Kind::Gnm => "gnm",
            Kind::TrajectoryCompare => "trajectory_compare",
            Kind::WalkVsPeel => "walk_vs_peel",
        }
    }
}

fn default_h_cutoff() -> usize {
    50
}

fn default_epsilon_prime() -> f64 {
    0.02
}

/// One experiment. `m` is `round(c n / 2)` for every `(n, c)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub k: usize,
    pub n_values: Vec<usize>,
    pub c_values: Vec<f64>,
    pub trials: usize,
    /// Largest `W` still counted as small.
    #[serde(default = "default_h_cutoff")]
    pub h_cutoff: usize,
    /// Fraction of `n` loop iterations a cascade must survive to count.
    #[serde(default = "default_epsilon_prime")]
    pub epsilon_prime: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<String>,
    /// Use the allocation (multigraph) model instead of simple graphs.
    #[serde(default)]
    pub multigraph: bool,
    /// Width of the stopping domain for trajectory comparisons.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Core-size gaps examined by the gap statistic.
    #[serde(default)]
    pub gamma_grid: Option<Vec<f64>>,
    /// Envelope width for the walk coupling; defaults to `10 t / n`.
    #[serde(default)]
    pub xi: Option<f64>,
    /// Coupling horizon `t = n^t_exponent`.
    #[serde(default)]
    pub t_exponent: Option<f64>,
    /// Retry cap for simple-graph rejection.
    #[serde(default)]
    pub max_retries: Option<u64>,
    /// Sup-norm tolerance for trajectory deviations.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

pub const DEFAULT_GAMMA: f64 = 0.05;
pub const DEFAULT_T_EXPONENT: f64 = 0.4;
pub const DEFAULT_MAX_RETRIES: u64 = 1_000_000;
pub const DEFAULT_TOLERANCE: f64 = 0.02;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.k < 3 {
            return bad(format!("k must be at least 3, got {}", self.k));
        }
        if self.n_values.is_empty() || self.c_values.is_empty() {
            return bad("n_values and c_values must be non-empty".into());
        }
        if self.n_values.contains(&0) {
            return bad("n_values must be positive".into());
        }
        if !(self.epsilon_prime > 0.0 && self.epsilon_prime < 1.0) {
            return bad(format!("epsilon_prime must lie in (0, 1), got {}", self.epsilon_prime));
        }
        let k = self.k as f64;
        let th = analytic::thresholds(self.k).map_err(|e| Error::Config(e.to_string()))?;
        for &c in &self.c_values {
            let ok = match self.kind {
                // c = k is the all-degrees-k case and is allowed for sweeps.
                Kind::Sweep => c >= k,
                Kind::WalkVsPeel => c > k,
                Kind::Gnm => c > th.c_k,
                Kind::TrajectoryCompare => c > k && c < th.c_k_prime,
            };
            if !ok {
                return bad(format!("c = {c} is out of range for a {} experiment", self.kind.as_str()));
            }
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0) {
                return bad(format!("gamma must be positive, got {g}"));
            }
        }
        if let Some(grid) = &self.gamma_grid {
            if grid.is_empty() || grid.iter().any(|&g| !(g > 0.0 && g < 1.0)) {
                return bad("gamma_grid entries must lie in (0, 1)".into());
            }
        }
        if let Some(xi) = self.xi {
            if !(0.0..=1.0).contains(&xi) {
                return bad(format!("xi must lie in [0, 1], got {xi}"));
            }
        }
        if let Some(t) = self.t_exponent {
            if !(0.0..=1.0).contains(&t) {
                return bad(format!("t_exponent must lie in [0, 1], got {t}"));
            }
        }
        if self.max_retries == Some(0) {
            return bad("max_retries must be positive".into());
        }
        Ok(())
    }

    /// The configured edge count for `(n, c)`.
    pub fn edges_for(n: usize, c: f64) -> usize {
        (c * n as f64 / 2.0).round() as usize
    }

    pub fn require_kind(&self, kind: Kind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Config(format!(
                "config kind is {}, expected {}",
                self.kind.as_str(),
                kind.as_str()
            )));
        }
        Ok(())
    }
}
