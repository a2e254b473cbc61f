use morl_core::{sample_simplex_uniform, ObjectiveVector, RngStream, WeightVector};
use morl_envs::{EnvConfig, StepResult, VecEnv};
use morl_nn::{log_prob_entropy, sample_categorical};
use ndarray::Array2;

use crate::{streams, AlgorithmVariant, EpisodeStats, Policy, PpoError, Result, RolloutBuffer};

#[derive(Debug, Clone)]
struct EpisodeAccumulator {
    length: usize,
    undiscounted: Vec<f64>,
    discounted: Vec<f64>,
    discount: f64,
}

impl EpisodeAccumulator {
    fn new(dim: usize) -> Self {
        Self { length: 0, undiscounted: vec![0.0; dim], discounted: vec![0.0; dim], discount: 1.0 }
    }

    fn add(&mut self, reward: &ObjectiveVector, gamma: f64) {
        for (d, r) in reward.iter().enumerate() {
            self.undiscounted[d] += *r;
            self.discounted[d] += self.discount * r;
        }
        self.discount *= gamma;
        self.length += 1;
    }
}

/// Steps a batch of environments with a policy and records transitions.
///
/// Each slot owns a random stream for its actions and weight draws, and a
/// fresh preference weight is drawn uniformly from the simplex whenever its
/// episode starts. The scalar variant trains on a summed reward with the
/// fixed weight `(1)`, while episode statistics keep every objective.
pub struct Collector {
    envs: VecEnv,
    variant: AlgorithmVariant,
    gamma: f64,
    objective_count: usize,
    value_dim: usize,
    observations: Vec<Vec<f64>>,
    weights: Vec<WeightVector>,
    rngs: Vec<RngStream>,
    episodes: Vec<EpisodeAccumulator>,
}

impl Collector {
    pub fn new(
        env: &EnvConfig,
        variant: AlgorithmVariant,
        instances: usize,
        workers: usize,
        seed: u64,
        gamma: f64,
    ) -> Result<Self> {
        let mut envs = VecEnv::from_config(env, instances, workers, variant.is_scalar())?;
        let objective_count = env.spec()?.objective_count;
        let value_dim = envs.spec().objective_count;
        let observations = envs.reset(seed, streams::ENV);
        let slots = envs.slot_count();
        let mut rngs: Vec<RngStream> = (0..slots as u64).map(|s| RngStream::new(seed, streams::SLOT + s)).collect();
        let weights = rngs.iter_mut().map(|rng| draw_weight(variant, value_dim, rng)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            envs,
            variant,
            gamma,
            objective_count,
            value_dim,
            observations,
            weights,
            rngs,
            episodes: vec![EpisodeAccumulator::new(objective_count); slots],
        })
    }

    pub fn slot_count(&self) -> usize {
        self.envs.slot_count()
    }

    pub fn value_dim(&self) -> usize {
        self.value_dim
    }

    pub fn objective_count(&self) -> usize {
        self.objective_count
    }

    pub fn observation_length(&self) -> usize {
        self.envs.spec().observation_length
    }

    pub fn action_count(&self) -> usize {
        self.envs.spec().action_count
    }

    /// Current weight of every slot.
    pub fn weights(&self) -> &[WeightVector] {
        &self.weights
    }

    fn observation_matrix(&self, rows: &[Vec<f64>]) -> Array2<f64> {
        let len = self.observation_length();
        Array2::from_shape_fn((rows.len(), len), |(i, j)| rows[i][j])
    }

    fn weight_matrix(&self, ws: &[&WeightVector]) -> Array2<f64> {
        Array2::from_shape_fn((ws.len(), self.value_dim), |(i, d)| ws[i].as_slice()[d])
    }

    fn check_policy(&self, policy: &Policy) -> Result<()> {
        let c = &policy.config;
        if c.input_length != self.observation_length()
            || c.action_count != self.action_count()
            || c.value_dim != self.value_dim
            || c.condition_on_weights != self.variant.is_conditioned()
        {
            return Err(PpoError::Dimension(format!(
                "policy (input {}, actions {}, value dim {}, conditioned {}) does not fit {} on {} \
                 (observation {}, actions {}, value dim {})",
                c.input_length,
                c.action_count,
                c.value_dim,
                c.condition_on_weights,
                self.variant,
                self.envs.spec().name,
                self.observation_length(),
                self.action_count(),
                self.value_dim
            )));
        }
        Ok(())
    }

    /// Steps every slot `horizon` times.
    pub fn collect(&mut self, policy: &Policy, horizon: usize) -> Result<RolloutBuffer> {
        self.check_policy(policy)?;
        let slots = self.slot_count();
        let mut buffer = RolloutBuffer::zeros(horizon, slots, self.observation_length(), self.value_dim);
        for t in 0..horizon {
            let obs = self.observation_matrix(&self.observations);
            let weights = self.weight_matrix(&self.weights.iter().collect::<Vec<_>>());
            let out = policy.forward(obs.view(), weights.view())?;
            let mut actions = Vec::with_capacity(slots);
            for s in 0..slots {
                let logits = out.logits.row(s);
                let logits = logits.as_slice().expect("row-major logits");
                let a = sample_categorical(logits, &mut self.rngs[s]);
                let i = buffer.index(t, s);
                buffer.log_probs[i] = log_prob_entropy(logits, a)?.0;
                buffer.actions[i] = a;
                actions.push(a);
            }
            let base = t * slots;
            buffer.observations.slice_mut(ndarray::s![base..base + slots, ..]).assign(&obs);
            buffer.values.slice_mut(ndarray::s![base..base + slots, ..]).assign(&out.values);
            buffer.weights.slice_mut(ndarray::s![base..base + slots, ..]).assign(&weights);

            let results = self.envs.step(&actions)?;
            let components = self.envs.reward_components();
            self.record_step(&mut buffer, t, results, components, policy)?;
        }
        let obs = self.observation_matrix(&self.observations);
        let weights = self.weight_matrix(&self.weights.iter().collect::<Vec<_>>());
        buffer.last_values = policy.forward(obs.view(), weights.view())?.values;
        Ok(buffer)
    }

    fn record_step(
        &mut self,
        buffer: &mut RolloutBuffer,
        t: usize,
        results: Vec<StepResult>,
        components: Option<Vec<ObjectiveVector>>,
        policy: &Policy,
    ) -> Result<()> {
        let mut truncated_slots = Vec::new();
        let mut final_observations = Vec::new();
        for (s, result) in results.into_iter().enumerate() {
            let i = buffer.index(t, s);
            for (d, r) in result.reward.iter().enumerate() {
                buffer.rewards[[i, d]] = *r;
            }
            buffer.terminated[i] = result.terminated;
            buffer.truncated[i] = result.truncated;
            let full = components.as_ref().map_or(&result.reward, |c| &c[s]);
            self.episodes[s].add(full, self.gamma);
            if result.done() {
                let acc = std::mem::replace(&mut self.episodes[s], EpisodeAccumulator::new(self.objective_count));
                buffer.episodes.push(EpisodeStats {
                    slot: s,
                    length: acc.length,
                    undiscounted: ObjectiveVector::new(acc.undiscounted)?,
                    discounted: ObjectiveVector::new(acc.discounted)?,
                    truncated: result.truncated,
                });
                if result.truncated {
                    truncated_slots.push(s);
                    final_observations.push(result.observation);
                }
                self.observations[s] = self.envs.reset_slot(s)?;
            } else {
                self.observations[s] = result.observation;
            }
        }
        if !truncated_slots.is_empty() {
            // The episode's own weight bootstraps its value, before resampling.
            let obs = self.observation_matrix(&final_observations);
            let ws: Vec<&WeightVector> = truncated_slots.iter().map(|&s| &self.weights[s]).collect();
            let weights = self.weight_matrix(&ws);
            let values = policy.forward(obs.view(), weights.view())?.values;
            for (k, &s) in truncated_slots.iter().enumerate() {
                let i = buffer.index(t, s);
                buffer.bootstrap_values.row_mut(i).assign(&values.row(k));
            }
        }
        for s in 0..self.slot_count() {
            let i = buffer.index(t, s);
            if buffer.terminated[i] || buffer.truncated[i] {
                self.weights[s] = draw_weight(self.variant, self.value_dim, &mut self.rngs[s])?;
            }
        }
        Ok(())
    }
}

fn draw_weight(variant: AlgorithmVariant, dim: usize, rng: &mut RngStream) -> Result<WeightVector> {
    if variant.is_scalar() {
        Ok(WeightVector::uniform(1))
    } else {
        Ok(sample_simplex_uniform(rng, dim)?)
    }
}
