//! A small multilayer perceptron with a categorical policy head and a
//! D-dimensional value head, differentiated by a reverse-mode tape over
//! dense `f64` matrices.
//!
//! Two forward paths share the same parameters: [`forward_batch`] is a plain
//! evaluation used during rollouts, and [`Graph::forward`] records every
//! operation so [`Graph::backward`] can return gradients aligned with
//! [`NetworkParams`].

mod adam;
mod categorical;
mod checkpoint;
mod config;
mod error;
mod network;
mod params;
mod tape;

pub use adam::{adam_step, clip_grad_norm, AdamConfig, AdamState};
pub use categorical::{log_prob_entropy, log_softmax, sample_categorical, softmax};
pub use checkpoint::{CheckpointMetadata, PolicyCheckpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use config::{Activation, NetworkConfig};
pub use error::NnError;
pub use network::{build_input, forward, forward_batch, BatchOutput, Graph, PolicyOutput};
pub use params::{NetworkParams, TensorShape};
pub use tape::{Gradients, Tape, Var};

pub type Result<T, E = NnError> = std::result::Result<T, E>;
