//! Multi-objective environments that emit one reward component per
//! objective instead of their sum.
//!
//! | env    | objectives (in order)     | agents | actions |
//! |--------|---------------------------|--------|---------|
//! | bandit | e_0, e_1, e_2             | 1      | 3       |
//! | snake  | food, corpse, death       | 4      | 4       |
//! | tetris | combo, drop, rotate       | 1      | 6       |
//!
//! Every environment owns its [`RngStream`]: a fixed seed and a fixed action
//! sequence reproduce the same [`StepResult`] stream bit for bit.

mod bandit;
mod clock;
mod config;
mod error;
mod scalar;
mod snake;
mod spec;
mod tetris;
mod trace;
mod vec_env;

pub use bandit::{preference_bandit_optimal_return, PreferenceBandit};
pub use config::{BanditConfig, EnvConfig, EnvKind, SnakeConfig, TetrisConfig};
pub use error::EnvError;
pub use scalar::{scalar_reward_view, ScalarRewardView};
pub use snake::{Snake, SnakeAction, SNAKE_CHANNELS};
pub use spec::{EnvSpec, StepResult};
pub use tetris::{Tetris, TetrisAction, TETROMINO_COUNT};
pub use trace::TraceWriter;
pub use vec_env::VecEnv;

use morl_core::{ObjectiveVector, RngStream};

pub type Result<T, E = EnvError> = std::result::Result<T, E>;

/// A (possibly multi-agent) environment with vector-valued rewards.
///
/// Agents whose episode ended (terminated or truncated) must be restarted
/// with [`MoEnv::reset_agent`] before the next [`MoEnv::step`].
pub trait MoEnv: Send {
    fn spec(&self) -> &EnvSpec;

    /// Starts fresh episodes for every agent, drawing all randomness from `rng`.
    fn reset(&mut self, rng: RngStream) -> Vec<Vec<f64>>;

    /// Starts a new episode for one agent whose previous episode ended.
    fn reset_agent(&mut self, agent: usize) -> Result<Vec<f64>>;

    /// Advances one tick with one action per agent.
    fn step(&mut self, actions: &[usize]) -> Result<Vec<StepResult>>;

    /// Per-objective rewards behind the last step, for adapters whose own
    /// reward is a reduction of them.
    fn reward_components(&self) -> Option<&[ObjectiveVector]> {
        None
    }
}

impl MoEnv for Box<dyn MoEnv> {
    fn spec(&self) -> &EnvSpec {
        (**self).spec()
    }

    fn reset(&mut self, rng: RngStream) -> Vec<Vec<f64>> {
        (**self).reset(rng)
    }

    fn reset_agent(&mut self, agent: usize) -> Result<Vec<f64>> {
        (**self).reset_agent(agent)
    }

    fn step(&mut self, actions: &[usize]) -> Result<Vec<StepResult>> {
        (**self).step(actions)
    }

    fn reward_components(&self) -> Option<&[ObjectiveVector]> {
        (**self).reward_components()
    }
}

pub(crate) fn check_actions(spec: &EnvSpec, actions: &[usize]) -> Result<()> {
    if actions.len() != spec.agents_per_instance {
        return Err(EnvError::ActionCount { expected: spec.agents_per_instance, got: actions.len() });
    }
    for (agent, &action) in actions.iter().enumerate() {
        if action >= spec.action_count {
            return Err(EnvError::InvalidAction { agent, action, count: spec.action_count });
        }
    }
    Ok(())
}
