use morl_core::ObjectiveVector;

use crate::{EnvError, Result};

/// Static description of an environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvSpec {
    pub name: String,
    pub objective_count: usize,
    pub objective_names: Vec<String>,
    pub observation_length: usize,
    pub action_count: usize,
    pub agents_per_instance: usize,
    pub max_episode_steps: usize,
    /// Per-episode horizons are drawn uniformly from
    /// `max_episode_steps ± truncation_jitter`.
    pub truncation_jitter: usize,
}

impl EnvSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(EnvError::Config(m));
        if self.objective_count == 0 || self.objective_names.len() != self.objective_count {
            return fail(format!(
                "{} objective names for {} objectives",
                self.objective_names.len(),
                self.objective_count
            ));
        }
        if self.observation_length == 0 || self.action_count == 0 || self.agents_per_instance == 0 {
            return fail("observation length, action count and agent count must be positive".into());
        }
        if self.max_episode_steps == 0 || self.truncation_jitter >= self.max_episode_steps {
            return fail(format!(
                "truncation jitter {} must be below max episode steps {}",
                self.truncation_jitter, self.max_episode_steps
            ));
        }
        Ok(())
    }

    /// Longest possible episode.
    pub fn episode_step_limit(&self) -> usize {
        self.max_episode_steps + self.truncation_jitter
    }
}

/// What one agent observes after one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Vec<f64>,
    pub reward: ObjectiveVector,
    pub terminated: bool,
    pub truncated: bool,
}

impl StepResult {
    pub fn done(&self) -> bool {
        self.terminated || self.truncated
    }
}
