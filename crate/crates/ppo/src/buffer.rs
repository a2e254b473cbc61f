use morl_core::ObjectiveVector;
use ndarray::Array2;

use crate::{PpoError, Result};

/// Per-objective returns of one finished episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeStats {
    pub slot: usize,
    pub length: usize,
    pub undiscounted: ObjectiveVector,
    pub discounted: ObjectiveVector,
    /// Whether the episode ended by truncation rather than termination.
    pub truncated: bool,
}

/// Transitions of one rollout, row `t * slots + s` for step `t` of slot `s`.
///
/// `bootstrap_values` holds the critic's value of the final observation on
/// rows whose episode was truncated and is zero elsewhere; `last_values`
/// holds the value of each slot's observation after the last step.
#[derive(Debug, Clone, PartialEq)]
pub struct RolloutBuffer {
    pub horizon: usize,
    pub slots: usize,
    pub observations: Array2<f64>,
    pub actions: Vec<usize>,
    pub log_probs: Vec<f64>,
    pub rewards: Array2<f64>,
    pub values: Array2<f64>,
    pub weights: Array2<f64>,
    pub terminated: Vec<bool>,
    pub truncated: Vec<bool>,
    pub bootstrap_values: Array2<f64>,
    pub last_values: Array2<f64>,
    /// Episodes that finished during this rollout, with returns in the
    /// environment's full objective space.
    pub episodes: Vec<EpisodeStats>,
}

impl RolloutBuffer {
    pub fn zeros(horizon: usize, slots: usize, observation_length: usize, value_dim: usize) -> Self {
        let n = horizon * slots;
        Self {
            horizon,
            slots,
            observations: Array2::zeros((n, observation_length)),
            actions: vec![0; n],
            log_probs: vec![0.0; n],
            rewards: Array2::zeros((n, value_dim)),
            values: Array2::zeros((n, value_dim)),
            weights: Array2::zeros((n, value_dim)),
            terminated: vec![false; n],
            truncated: vec![false; n],
            bootstrap_values: Array2::zeros((n, value_dim)),
            last_values: Array2::zeros((slots, value_dim)),
            episodes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.horizon * self.slots
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value_dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn index(&self, t: usize, slot: usize) -> usize {
        t * self.slots + slot
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let d = self.value_dim();
        let rows_ok = [&self.rewards, &self.values, &self.weights, &self.bootstrap_values]
            .iter()
            .all(|a| a.dim() == (n, d));
        let lens_ok = [self.actions.len(), self.log_probs.len(), self.terminated.len(), self.truncated.len()]
            .iter()
            .all(|&l| l == n);
        if !rows_ok || !lens_ok || self.observations.nrows() != n || self.last_values.dim() != (self.slots, d) {
            return Err(PpoError::Dimension(format!(
                "rollout buffer arrays disagree with {} steps x {} slots x {d} objectives",
                self.horizon, self.slots
            )));
        }
        Ok(())
    }
}
