use morl_core::RngStream;
use morl_nn::{adam_step, clip_grad_norm, AdamConfig, AdamState, Graph, Var};
use ndarray::{Array2, Axis};

use crate::{vector_gae, Policy, PpoError, Result, RolloutBuffer, TrainConfig};

/// One minibatch with advantages already scalarized and normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Minibatch {
    pub observations: Array2<f64>,
    pub weights: Array2<f64>,
    pub actions: Vec<usize>,
    /// Behavior log-probabilities, `n x 1`.
    pub old_log_probs: Array2<f64>,
    /// `A_t · w_t`, normalized within the minibatch, `n x 1`.
    pub advantages: Array2<f64>,
    /// Per-objective value targets, `n x D`.
    pub targets: Array2<f64>,
}

impl Minibatch {
    /// Gathers `indices` from a buffer and its GAE output.
    pub fn gather(buffer: &RolloutBuffer, advantages: &Array2<f64>, targets: &Array2<f64>, indices: &[usize]) -> Self {
        let weights = buffer.weights.select(Axis(0), indices);
        let scalar: Vec<f64> = indices
            .iter()
            .map(|&i| advantages.row(i).dot(&buffer.weights.row(i)))
            .collect();
        Self {
            observations: buffer.observations.select(Axis(0), indices),
            actions: indices.iter().map(|&i| buffer.actions[i]).collect(),
            old_log_probs: Array2::from_shape_fn((indices.len(), 1), |(k, _)| buffer.log_probs[indices[k]]),
            advantages: Array2::from_shape_vec((indices.len(), 1), normalize(&scalar)).expect("column"),
            targets: targets.select(Axis(0), indices),
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Zero mean, unit (population) standard deviation.
fn normalize(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let std = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    x.iter().map(|v| (v - mean) / (std + 1e-8)).collect()
}

/// Nodes of an assembled PPO loss.
#[derive(Debug, Clone, Copy)]
pub struct LossTerms {
    pub total: Var,
    pub policy: Var,
    pub value: Var,
    pub entropy: Var,
    /// Probability ratios, `n x 1`.
    pub ratio: Var,
}

/// Records the clipped-surrogate loss on `graph`:
/// `policy + value_coef · value − entropy_coef · entropy`, where the value
/// term is the weight-scaled squared error `Σ_d w_d (v_d − target_d)²`
/// averaged over the minibatch.
pub fn build_loss(graph: &mut Graph<'_>, batch: &Minibatch, config: &TrainConfig) -> Result<LossTerms> {
    let w = graph.config().condition_on_weights.then(|| batch.weights.view());
    let (logits, values) = graph.forward(batch.observations.view(), w)?;
    let eps = config.clip_epsilon;
    let t = graph.tape();
    let logp = t.log_softmax(logits);
    let picked = t.pick(logp, &batch.actions)?;
    let old = t.leaf(batch.old_log_probs.clone());
    let log_ratio = t.sub(picked, old)?;
    let ratio = t.exp(log_ratio);
    let adv = t.leaf(batch.advantages.clone());
    let surr1 = t.mul(ratio, adv)?;
    let clipped = t.clamp(ratio, 1.0 - eps, 1.0 + eps);
    let surr2 = t.mul(clipped, adv)?;
    let surr = t.minimum(surr1, surr2)?;
    let surr = t.mean(surr);
    let policy = t.neg(surr);

    let targets = t.leaf(batch.targets.clone());
    let err = t.sub(values, targets)?;
    let sq = t.square(err);
    let weights = t.leaf(batch.weights.clone());
    let weighted = t.mul(sq, weights)?;
    let per_sample = t.row_sum(weighted);
    let value = t.mean(per_sample);

    let probs = t.exp(logp);
    let plogp = t.mul(probs, logp)?;
    let neg_entropy = t.row_sum(plogp);
    let neg_entropy = t.mean(neg_entropy);
    let entropy = t.neg(neg_entropy);

    let v = t.scale(value, config.value_coef);
    let e = t.scale(entropy, -config.entropy_coef);
    let total = t.add(policy, v)?;
    let total = t.add(total, e)?;
    Ok(LossTerms { total, policy, value, entropy, ratio })
}

/// Averages over every minibatch of one update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpdateStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub clip_fraction: f64,
    pub approx_kl: f64,
    pub grad_norm: f64,
}

/// GAE, then `epochs_per_update` passes of shuffled minibatch steps.
pub fn ppo_update(
    policy: &mut Policy,
    optimizer: &mut AdamState,
    buffer: &RolloutBuffer,
    config: &TrainConfig,
    gamma: f64,
    rng: &mut RngStream,
) -> Result<UpdateStats> {
    if buffer.value_dim() != policy.config.value_dim || buffer.observations.ncols() != policy.config.input_length {
        return Err(PpoError::Dimension(format!(
            "buffer (observation {}, value dim {}) does not fit policy (input {}, value dim {})",
            buffer.observations.ncols(),
            buffer.value_dim(),
            policy.config.input_length,
            policy.config.value_dim
        )));
    }
    let (advantages, targets) = vector_gae(buffer, gamma, config.gae_lambda)?;
    let n = buffer.len();
    let chunk = n.div_ceil(config.minibatch_count).max(1);
    let mut indices: Vec<usize> = (0..n).collect();
    let mut stats = UpdateStats::default();
    let mut count = 0usize;
    for epoch in 0..config.epochs_per_update {
        rng.shuffle(&mut indices);
        for (minibatch, idx) in indices.chunks(chunk).enumerate() {
            let batch = Minibatch::gather(buffer, &advantages, &targets, idx);
            let (grads, terms) = {
                let mut graph = Graph::new(&policy.config, &policy.params)?;
                let loss = build_loss(&mut graph, &batch, config)?;
                let tape = graph.tape();
                let values = [loss.total, loss.policy, loss.value, loss.entropy].map(|v| tape.scalar(v));
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(PpoError::NonFiniteLoss {
                        epoch,
                        minibatch,
                        dump: format!(
                            "total {} policy {} value {} entropy {}; advantages in [{}, {}], targets in [{}, {}]",
                            values[0],
                            values[1],
                            values[2],
                            values[3],
                            min(&batch.advantages),
                            max(&batch.advantages),
                            min(&batch.targets),
                            max(&batch.targets)
                        ),
                    });
                }
                let ratios = tape.value(loss.ratio).clone();
                let grads = graph.backward(loss.total)?;
                (grads, (values, ratios))
            };
            let (values, ratios) = terms;
            let mut grads = grads;
            let norm = clip_grad_norm(&mut grads, config.max_grad_norm);
            adam_step(policy.params.as_mut_slice(), &grads, optimizer, config.learning_rate, AdamConfig::default())?;

            let m = ratios.len() as f64;
            stats.policy_loss += values[1];
            stats.value_loss += values[2];
            stats.entropy += values[3];
            stats.clip_fraction +=
                ratios.iter().filter(|&&r| (r - 1.0).abs() > config.clip_epsilon).count() as f64 / m;
            stats.approx_kl += ratios.iter().map(|&r| (r - 1.0) - r.ln()).sum::<f64>() / m;
            stats.grad_norm += norm;
            count += 1;
        }
    }
    let k = count.max(1) as f64;
    Ok(UpdateStats {
        policy_loss: stats.policy_loss / k,
        value_loss: stats.value_loss / k,
        entropy: stats.entropy / k,
        clip_fraction: stats.clip_fraction / k,
        approx_kl: stats.approx_kl / k,
        grad_norm: stats.grad_norm / k,
    })
}

fn min(a: &Array2<f64>) -> f64 {
    a.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max(a: &Array2<f64>) -> f64 {
    a.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
