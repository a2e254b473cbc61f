use morl_core::{ObjectiveVector, WeightVector};
use ndarray::{concatenate, Array2, ArrayView2, Axis};

use crate::{Activation, NetworkConfig, NetworkParams, NnError, Result, Tape, Var};

/// Policy logits and multi-objective value for one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyOutput {
    pub action_logits: Vec<f64>,
    pub value: ObjectiveVector,
}

/// Row-aligned logits (`batch x actions`) and values (`batch x D`).
#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutput {
    pub logits: Array2<f64>,
    pub values: Array2<f64>,
}

/// Network input: observations, with the weight rows appended for
/// conditioned networks.
pub fn build_input(
    config: &NetworkConfig,
    observations: ArrayView2<'_, f64>,
    weights: Option<ArrayView2<'_, f64>>,
) -> Result<Array2<f64>> {
    let (rows, cols) = observations.dim();
    if cols != config.input_length {
        return Err(NnError::Length { expected: config.input_length, got: cols });
    }
    match (config.condition_on_weights, weights) {
        (true, None) => Err(NnError::MissingWeights),
        (false, Some(_)) => Err(NnError::UnexpectedWeights),
        (false, None) => Ok(observations.to_owned()),
        (true, Some(w)) => {
            if w.dim() != (rows, config.value_dim) {
                return Err(NnError::Shape { op: "weights", left: (rows, config.value_dim), right: w.dim() });
            }
            Ok(concatenate(Axis(1), &[observations, w]).expect("row counts checked"))
        }
    }
}

fn check_params(config: &NetworkConfig, params: &NetworkParams) -> Result<()> {
    let expected = config.param_count();
    if params.len() != expected {
        return Err(NnError::Length { expected, got: params.len() });
    }
    Ok(())
}

/// Batched evaluation without recording gradients.
pub fn forward_batch(
    params: &NetworkParams,
    config: &NetworkConfig,
    observations: ArrayView2<'_, f64>,
    weights: Option<ArrayView2<'_, f64>>,
) -> Result<BatchOutput> {
    check_params(config, params)?;
    let mut h = build_input(config, observations, weights)?;
    let layers = config.hidden_sizes.len();
    for layer in 0..layers {
        h = h.dot(&params.tensor(2 * layer)) + params.tensor(2 * layer + 1);
        match config.activation {
            Activation::Tanh => h.mapv_inplace(f64::tanh),
            Activation::Relu => h.mapv_inplace(|x| x.max(0.0)),
        }
    }
    let logits = h.dot(&params.tensor(2 * layers)) + params.tensor(2 * layers + 1);
    let values = h.dot(&params.tensor(2 * layers + 2)) + params.tensor(2 * layers + 3);
    Ok(BatchOutput { logits, values })
}

/// Single-observation convenience wrapper around [`forward_batch`].
pub fn forward(
    params: &NetworkParams,
    config: &NetworkConfig,
    observation: &[f64],
    w: Option<&WeightVector>,
) -> Result<PolicyOutput> {
    let obs = ArrayView2::from_shape((1, observation.len()), observation)
        .map_err(|_| NnError::Length { expected: config.input_length, got: observation.len() })?;
    let w_row = w.map(|w| Array2::from_shape_vec((1, w.dim()), w.as_slice().to_vec()).expect("one row"));
    let out = forward_batch(params, config, obs, w_row.as_ref().map(|w| w.view()))?;
    Ok(PolicyOutput {
        action_logits: out.logits.row(0).to_vec(),
        value: ObjectiveVector::new(out.values.row(0).to_vec()).map_err(|e| NnError::Config(e.to_string()))?,
    })
}

/// A tape bound to one parameter vector.
///
/// Parameters are placed on the tape at the first [`Graph::forward`]; the
/// caller builds a loss from the returned nodes with [`Graph::tape`] and
/// collects gradients aligned with [`NetworkParams`] via [`Graph::backward`].
pub struct Graph<'a> {
    config: &'a NetworkConfig,
    params: &'a NetworkParams,
    tape: Tape,
    param_vars: Vec<Var>,
}

impl<'a> Graph<'a> {
    pub fn new(config: &'a NetworkConfig, params: &'a NetworkParams) -> Result<Self> {
        check_params(config, params)?;
        Ok(Self { config, params, tape: Tape::new(), param_vars: Vec::new() })
    }

    pub fn config(&self) -> &NetworkConfig {
        self.config
    }

    pub fn tape(&mut self) -> &mut Tape {
        &mut self.tape
    }

    pub fn value(&self, v: Var) -> &Array2<f64> {
        self.tape.value(v)
    }

    /// Records a batched forward pass; returns `(logits, values)` nodes.
    pub fn forward(
        &mut self,
        observations: ArrayView2<'_, f64>,
        weights: Option<ArrayView2<'_, f64>>,
    ) -> Result<(Var, Var)> {
        let input = build_input(self.config, observations, weights)?;
        if self.param_vars.is_empty() {
            self.param_vars = (0..self.params.shapes().len())
                .map(|i| self.tape.leaf(self.params.tensor(i).to_owned()))
                .collect();
        }
        let p = &self.param_vars;
        let mut h = self.tape.leaf(input);
        let layers = self.config.hidden_sizes.len();
        for layer in 0..layers {
            let z = self.tape.matmul(h, p[2 * layer])?;
            let z = self.tape.add_row(z, p[2 * layer + 1])?;
            h = match self.config.activation {
                Activation::Tanh => self.tape.tanh(z),
                Activation::Relu => self.tape.relu(z),
            };
        }
        let logits = self.tape.matmul(h, p[2 * layers])?;
        let logits = self.tape.add_row(logits, p[2 * layers + 1])?;
        let values = self.tape.matmul(h, p[2 * layers + 2])?;
        let values = self.tape.add_row(values, p[2 * layers + 3])?;
        Ok((logits, values))
    }

    /// Gradient of the 1x1 node `loss`, flattened like the parameters.
    pub fn backward(&self, loss: Var) -> Result<Vec<f64>> {
        if self.param_vars.is_empty() {
            return Err(NnError::NoForward);
        }
        let grads = self.tape.backward(loss)?;
        let mut flat = vec![0.0; self.params.len()];
        for (shape, &v) in self.params.shapes().iter().zip(&self.param_vars) {
            let g = grads.get(v);
            flat[shape.range()].copy_from_slice(g.as_standard_layout().as_slice().expect("standard layout"));
        }
        Ok(flat)
    }
}

#[cfg(test)]
mod tests {
    use morl_core::RngStream;
    use ndarray::array;

    use super::*;

    fn config(cond: bool) -> NetworkConfig {
        NetworkConfig::new(4, 3, 2, cond).with_hidden(vec![5, 6])
    }

    #[test]
    fn zero_params_give_uniform_logits_and_zero_value() {
        let c = config(false);
        let out = forward(&NetworkParams::zeros(&c), &c, &[0.3, -1.0, 2.0, 0.1], None).unwrap();
        assert!(out.action_logits.iter().all(|&l| l == out.action_logits[0]));
        assert_eq!(out.value.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn weights_must_match_conditioning() {
        let w = WeightVector::uniform(2);
        let obs = [0.0; 4];
        let c = config(false);
        let p = NetworkParams::zeros(&c);
        assert!(matches!(forward(&p, &c, &obs, Some(&w)), Err(NnError::UnexpectedWeights)));
        let c = config(true);
        let p = NetworkParams::zeros(&c);
        assert!(matches!(forward(&p, &c, &obs, None), Err(NnError::MissingWeights)));
        assert!(forward(&p, &c, &obs, Some(&w)).is_ok());
    }

    #[test]
    fn tape_and_plain_forward_agree() {
        let c = config(true).with_activation(Activation::Relu);
        let p = NetworkParams::init(&c, &mut RngStream::new(4, 0)).unwrap();
        let obs = array![[0.1, 0.2, -0.3, 0.4], [1.0, -1.0, 0.5, 0.0]];
        let w = array![[0.3, 0.7], [1.0, 0.0]];
        let plain = forward_batch(&p, &c, obs.view(), Some(w.view())).unwrap();
        let mut g = Graph::new(&c, &p).unwrap();
        let (l, v) = g.forward(obs.view(), Some(w.view())).unwrap();
        assert_eq!(g.value(l), &plain.logits);
        assert_eq!(g.value(v), &plain.values);
    }

    #[test]
    fn backward_requires_forward() {
        let c = config(false);
        let p = NetworkParams::zeros(&c);
        let mut g = Graph::new(&c, &p).unwrap();
        let x = g.tape().leaf(array![[1.0]]);
        assert!(matches!(g.backward(x), Err(NnError::NoForward)));
    }
}
