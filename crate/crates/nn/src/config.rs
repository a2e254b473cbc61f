use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{NnError, Result, TensorShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
    Relu,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = NnError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            other => Err(NnError::Config(format!("unknown activation {other:?} (tanh, relu)"))),
        }
    }
}

/// Shape of the policy/value network.
///
/// When `condition_on_weights` is set the weight vector is appended to the
/// observation, so the first layer sees `input_length + value_dim` inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkConfig {
    pub input_length: usize,
    pub hidden_sizes: Vec<usize>,
    pub activation: Activation,
    pub action_count: usize,
    pub value_dim: usize,
    pub condition_on_weights: bool,
}

impl NetworkConfig {
    /// Two tanh layers of 128 units.
    pub fn new(input_length: usize, action_count: usize, value_dim: usize, condition_on_weights: bool) -> Self {
        Self {
            input_length,
            hidden_sizes: vec![128, 128],
            activation: Activation::Tanh,
            action_count,
            value_dim,
            condition_on_weights,
        }
    }

    pub fn with_hidden(mut self, hidden_sizes: Vec<usize>) -> Self {
        self.hidden_sizes = hidden_sizes;
        self
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_length == 0 || self.action_count == 0 || self.value_dim == 0 {
            return Err(NnError::Config("input length, action count and value dimension must be positive".into()));
        }
        if self.hidden_sizes.contains(&0) {
            return Err(NnError::Config(format!("hidden sizes must be positive: {:?}", self.hidden_sizes)));
        }
        Ok(())
    }

    pub fn effective_input_length(&self) -> usize {
        self.input_length + if self.condition_on_weights { self.value_dim } else { 0 }
    }

    /// Width of the last trunk layer, which feeds both heads.
    pub fn trunk_width(&self) -> usize {
        self.hidden_sizes.last().copied().unwrap_or_else(|| self.effective_input_length())
    }

    /// Tensor shapes in storage order: `(W, b)` per hidden layer, then the
    /// logits head, then the value head.
    pub fn param_shapes(&self) -> Vec<TensorShape> {
        let mut dims = Vec::new();
        let mut fan_in = self.effective_input_length();
        for &h in &self.hidden_sizes {
            dims.push((fan_in, h));
            dims.push((1, h));
            fan_in = h;
        }
        dims.push((fan_in, self.action_count));
        dims.push((1, self.action_count));
        dims.push((fan_in, self.value_dim));
        dims.push((1, self.value_dim));
        let mut offset = 0;
        dims.into_iter()
            .map(|(rows, cols)| {
                let s = TensorShape { rows, cols, offset };
                offset += rows * cols;
                s
            })
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.param_shapes().iter().map(TensorShape::len).sum()
    }
}
