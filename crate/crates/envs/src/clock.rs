use morl_core::RngStream;

use crate::EnvSpec;

/// Per-episode step counter with a jittered truncation horizon.
#[derive(Debug, Clone, Default)]
pub(crate) struct EpisodeClock {
    steps: usize,
    limit: usize,
}

impl EpisodeClock {
    pub fn start(spec: &EnvSpec, rng: &mut RngStream) -> Self {
        let jitter = spec.truncation_jitter;
        let limit = if jitter == 0 {
            spec.max_episode_steps
        } else {
            rng.range_inclusive(spec.max_episode_steps - jitter, spec.max_episode_steps + jitter)
        };
        Self { steps: 0, limit }
    }

    /// Counts one step; true when the horizon has been reached.
    pub fn tick(&mut self) -> bool {
        self.steps += 1;
        self.steps >= self.limit
    }
}
