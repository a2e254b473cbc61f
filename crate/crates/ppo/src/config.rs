use morl_nn::Activation;
use serde::{Deserialize, Serialize};

use crate::{PpoError, Result};

/// Optimization hyperparameters and rollout geometry.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    /// Agent transitions to collect in total.
    pub total_steps: u64,
    /// Steps per slot per rollout.
    pub horizon: usize,
    /// Environment instances stepped together.
    pub instances: usize,
    /// Threads for environment stepping; results do not depend on it.
    pub workers: usize,
    pub minibatch_count: usize,
    pub epochs_per_update: usize,
    pub clip_epsilon: f64,
    pub gae_lambda: f64,
    /// `None` uses the environment's default discount.
    pub gamma: Option<f64>,
    pub entropy_coef: f64,
    pub value_coef: f64,
    pub learning_rate: f64,
    pub max_grad_norm: f64,
    pub hidden_sizes: Vec<usize>,
    pub activation: Activation,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            total_steps: 100_000,
            horizon: 128,
            instances: 8,
            workers: 1,
            minibatch_count: 4,
            epochs_per_update: 4,
            clip_epsilon: 0.2,
            gae_lambda: 0.95,
            gamma: None,
            entropy_coef: 0.01,
            value_coef: 0.5,
            learning_rate: 3e-4,
            max_grad_norm: 0.5,
            hidden_sizes: vec![128, 128],
            activation: Activation::Tanh,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(PpoError::Config(m.into()));
        if !(self.gae_lambda > 0.0 && self.gae_lambda <= 1.0) {
            return fail("gae_lambda must lie in (0, 1]");
        }
        if !(self.clip_epsilon > 0.0 && self.clip_epsilon < 1.0) {
            return fail("clip_epsilon must lie in (0, 1)");
        }
        if let Some(g) = self.gamma {
            if !(0.0..1.0).contains(&g) {
                return fail("gamma must lie in [0, 1)");
            }
        }
        if self.horizon == 0 || self.instances == 0 || self.minibatch_count == 0 || self.epochs_per_update == 0 {
            return fail("horizon, instances, minibatch_count and epochs_per_update must be positive");
        }
        if !(self.learning_rate > 0.0 && self.max_grad_norm > 0.0) {
            return fail("learning_rate and max_grad_norm must be positive");
        }
        if !(self.entropy_coef >= 0.0 && self.value_coef >= 0.0) {
            return fail("loss coefficients must be non-negative");
        }
        if self.hidden_sizes.contains(&0) {
            return fail("hidden sizes must be positive");
        }
        Ok(())
    }
}
