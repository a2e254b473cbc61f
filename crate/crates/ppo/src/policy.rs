use morl_core::RngStream;
use morl_nn::{forward_batch, BatchOutput, NetworkConfig, NetworkParams, PolicyCheckpoint};
use ndarray::ArrayView2;

use crate::Result;

/// Network configuration with its current parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub config: NetworkConfig,
    pub params: NetworkParams,
}

impl Policy {
    pub fn init(config: NetworkConfig, rng: &mut RngStream) -> Result<Self> {
        let params = NetworkParams::init(&config, rng)?;
        Ok(Self { config, params })
    }

    pub fn from_checkpoint(checkpoint: &PolicyCheckpoint) -> Self {
        Self { config: checkpoint.config.clone(), params: checkpoint.params.clone() }
    }

    /// Evaluates a batch. `weights` always accompanies the observations;
    /// it reaches the network only when the network is conditioned.
    pub fn forward(&self, observations: ArrayView2<'_, f64>, weights: ArrayView2<'_, f64>) -> Result<BatchOutput> {
        let w = self.config.condition_on_weights.then_some(weights);
        Ok(forward_batch(&self.params, &self.config, observations, w)?)
    }
}
