//! Proximal policy optimization over vector rewards.
//!
//! One code path serves three variants: scalar PPO on the summed reward,
//! MOPPO whose policy ignores the preference weights, and MOPPO conditioned
//! on them. The multi-objective variants keep advantages and value targets
//! per objective and contract them with each episode's weight vector only
//! inside the loss.

mod buffer;
mod collect;
mod config;
mod error;
mod gae;
mod policy;
mod train;
mod update;
mod variant;

pub use buffer::{EpisodeStats, RolloutBuffer};
pub use collect::Collector;
pub use config::TrainConfig;
pub use error::PpoError;
pub use gae::vector_gae;
pub use policy::Policy;
pub use train::{train, write_metrics_csv, TrainOutput, UpdateLog};
pub use update::{build_loss, ppo_update, LossTerms, Minibatch, UpdateStats};
pub use variant::AlgorithmVariant;

pub type Result<T, E = PpoError> = std::result::Result<T, E>;

/// Stream ids that keep the independent random sources of one seed apart.
pub mod streams {
    /// Environment instance `i` uses `ENV + i`.
    pub const ENV: u64 = 0;
    /// Action sampling and weight draws for slot `s` use `SLOT + s`.
    pub const SLOT: u64 = 1 << 32;
    pub const INIT: u64 = 1 << 40;
    pub const SHUFFLE: u64 = (1 << 40) + 1;
}
