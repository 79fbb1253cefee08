//! Flat key-value run configuration (TOML syntax).
//!
//! Every key is optional; missing keys take the defaults below, which sit
//! inside the usual hyper-parameter ranges for this method.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::locality::DEFAULT_DENSE_CAP;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    /// Window size.
    pub w: usize,
    pub dense_cap: usize,

    // Deep Order Network
    pub learning_rate: f64,
    pub batch_size: usize,
    pub hidden_phi: usize,
    pub embed: usize,
    pub hidden_rho: usize,
    /// DON updates during the RL phase (or in total for bare training).
    pub global_steps: usize,
    /// DON updates before the first policy step; they seed the baseline.
    pub warmup_steps: usize,

    // Policy network
    pub policy_learning_rate: f64,
    pub policy_hidden: usize,
    pub trajectory_len: usize,
    pub rl_steps: usize,
    pub gamma: f64,
    /// Tuning rate as a multiple of `1/n`: the per-entry step is `tuning_rate / n`.
    pub tuning_rate: f64,
    pub eval_size: usize,
    /// Defaults to `global_steps / (rl_steps * trajectory_len)`.
    pub don_steps_per_t: Option<usize>,
    /// Defaults to `1e-6 / n`.
    pub epsilon_floor: Option<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            w: 5,
            dense_cap: DEFAULT_DENSE_CAP,
            learning_rate: 1e-3,
            batch_size: 64,
            hidden_phi: 64,
            embed: 64,
            hidden_rho: 64,
            global_steps: 5_000,
            warmup_steps: 100,
            policy_learning_rate: 1e-3,
            policy_hidden: 64,
            trajectory_len: 5,
            rl_steps: 50,
            gamma: 0.9,
            tuning_rate: 0.1,
            eval_size: 2_000,
            don_steps_per_t: None,
            epsilon_floor: None,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.w < 2 {
            return bad(format!("w must be at least 2 for training, got {}", self.w));
        }
        if !(self.learning_rate > 0.0 && self.policy_learning_rate > 0.0) {
            return bad("learning rates must be positive".into());
        }
        if self.batch_size == 0 || self.eval_size == 0 {
            return bad("batch_size and eval_size must be positive".into());
        }
        if self.hidden_phi == 0 || self.embed == 0 || self.hidden_rho == 0 || self.policy_hidden == 0 {
            return bad("hidden sizes must be positive".into());
        }
        if self.trajectory_len == 0 {
            return bad("trajectory_len must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma {} outside [0, 1]", self.gamma));
        }
        if !(self.tuning_rate > 0.0) {
            return bad("tuning_rate must be positive".into());
        }
        if let Some(f) = self.epsilon_floor {
            if !(f > 0.0) {
                return bad("epsilon_floor must be positive".into());
            }
        }
        Ok(())
    }

    pub fn don_steps_per_t(&self) -> usize {
        self.don_steps_per_t.unwrap_or_else(|| {
            (self.global_steps / (self.rl_steps * self.trajectory_len).max(1)).max(1)
        })
    }

    pub fn lambda(&self, n: usize) -> f64 {
        self.tuning_rate / n.max(1) as f64
    }
}
