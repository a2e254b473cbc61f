use std::io::{BufRead, Write};

use morl_core::{simplex_lattice, ObjectiveVector, RngStream, WeightVector};
use morl_envs::{EnvConfig, EnvSpec, StepResult};
use morl_metrics::{read_solution_csv, write_solution_csv, SolutionSet};
use morl_nn::{sample_categorical, PolicyCheckpoint};
use morl_ppo::{AlgorithmVariant, Policy};
use ndarray::Array2;
use rayon::prelude::*;

use crate::{EvalConfig, HarnessError, Result};

/// Chooses one action per agent given the current observations and the
/// conditioning weight.
pub trait Actor: Sync {
    fn act(&self, observations: &[Vec<f64>], weight: &WeightVector, rng: &mut RngStream) -> Result<Vec<usize>>;
}

/// A trained policy acting either greedily or by sampling.
#[derive(Debug, Clone)]
pub struct CheckpointActor {
    pub policy: Policy,
    pub deterministic: bool,
}

impl CheckpointActor {
    pub fn new(checkpoint: &PolicyCheckpoint, deterministic: bool) -> Self {
        Self { policy: Policy::from_checkpoint(checkpoint), deterministic }
    }
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate() {
        if x > row[best] {
            best = i;
        }
    }
    best
}

impl Actor for CheckpointActor {
    fn act(&self, observations: &[Vec<f64>], weight: &WeightVector, rng: &mut RngStream) -> Result<Vec<usize>> {
        let n = observations.len();
        let width = observations.first().map_or(0, Vec::len);
        let flat: Vec<f64> = observations.iter().flatten().copied().collect();
        let obs = Array2::from_shape_vec((n, width), flat)
            .map_err(|e| HarnessError::Mismatch(format!("ragged observations: {e}")))?;
        let weights = Array2::from_shape_fn((n, weight.dim()), |(_, d)| weight[d]);
        let out = self.policy.forward(obs.view(), weights.view())?;
        Ok(out
            .logits
            .rows()
            .into_iter()
            .map(|row| {
                let row = row.to_vec();
                if self.deterministic { argmax(&row) } else { sample_categorical(&row, rng) }
            })
            .collect())
    }
}

/// Per-objective returns of one evaluation episode, averaged over agents.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    pub discounted: ObjectiveVector,
    pub undiscounted: ObjectiveVector,
    /// Steps until the last agent finished.
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationPoint {
    pub weight: WeightVector,
    /// Mean discounted return over the point's episodes.
    pub mean_return: ObjectiveVector,
    pub episodes: usize,
}

/// Returns of one algorithm on every lattice weight.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord {
    pub algorithm: String,
    pub conditioned: bool,
    pub points: Vec<EvaluationPoint>,
}

impl EvaluationRecord {
    pub fn solution_set(&self) -> Result<SolutionSet> {
        Ok(SolutionSet::from_pairs(
            self.algorithm.clone(),
            self.points.iter().map(|p| (p.weight.clone(), p.mean_return.clone())),
        )?)
    }
}

/// Whether an algorithm id names a weight-conditioned algorithm. Ids are a
/// variant name optionally followed by `:label`; ids that name no known
/// variant are treated as conditioned.
pub fn is_conditioned_id(id: &str) -> bool {
    let prefix = id.split(':').next().unwrap_or(id);
    prefix.parse::<AlgorithmVariant>().map_or(true, AlgorithmVariant::is_conditioned)
}

/// Verifies that a checkpoint was trained on `env` and that its network
/// shapes fit the environment.
pub fn check_compatible(checkpoint: &PolicyCheckpoint, env: &EnvConfig) -> Result<EnvSpec> {
    let spec = env.spec()?;
    let net = &checkpoint.config;
    let meta = &checkpoint.metadata;
    let mut problems = Vec::new();
    if meta.env != env.kind.name() {
        problems.push(format!("trained on {:?}, evaluated on {:?}", meta.env, env.kind.name()));
    }
    if net.input_length != spec.observation_length {
        problems.push(format!("network reads {} inputs, observations have {}", net.input_length, spec.observation_length));
    }
    if net.action_count != spec.action_count {
        problems.push(format!("network has {} actions, environment {}", net.action_count, spec.action_count));
    }
    if net.value_dim != spec.objective_count && (net.condition_on_weights || net.value_dim != 1) {
        problems.push(format!("value head has {} outputs for {} objectives", net.value_dim, spec.objective_count));
    }
    if problems.is_empty() {
        Ok(spec)
    } else {
        Err(HarnessError::Mismatch(problems.join("; ")))
    }
}

/// Runs every agent of one environment instance through its first episode.
///
/// Agents that finish early are restarted so that the rest can keep
/// stepping, but nothing after their first episode is reported. The
/// environment draws from stream `2·stream` and actions from `2·stream + 1`.
/// `on_step` receives the step index, the results, and which agents were
/// still in their first episode when the step was taken.
pub(crate) fn drive_episode<A: Actor + ?Sized>(
    actor: &A,
    env: &EnvConfig,
    seed: u64,
    stream: u64,
    step_limit: Option<usize>,
    mut weight_at: impl FnMut(usize) -> WeightVector,
    mut on_step: impl FnMut(usize, &[StepResult], &[bool]),
) -> Result<usize> {
    let mut instance = env.build()?;
    let mut observations = instance.reset(RngStream::new(seed, 2 * stream));
    let mut rng = RngStream::new(seed, 2 * stream + 1);
    let mut active = vec![true; observations.len()];
    let mut step = 0;
    while active.iter().any(|&a| a) && step_limit.is_none_or(|limit| step < limit) {
        let actions = actor.act(&observations, &weight_at(step), &mut rng)?;
        let results = instance.step(&actions)?;
        on_step(step, &results, &active);
        for (agent, result) in results.into_iter().enumerate() {
            if result.done() {
                active[agent] = false;
                observations[agent] = instance.reset_agent(agent)?;
            } else {
                observations[agent] = result.observation;
            }
        }
        step += 1;
    }
    Ok(step)
}

/// One evaluation episode under a fixed weight.
pub fn run_episode<A: Actor + ?Sized>(
    actor: &A,
    env: &EnvConfig,
    weight: &WeightVector,
    gamma: f64,
    seed: u64,
    stream: u64,
) -> Result<EpisodeOutcome> {
    let spec = env.spec()?;
    let (agents, dim) = (spec.agents_per_instance, spec.objective_count);
    let mut discounted = vec![0.0; dim];
    let mut undiscounted = vec![0.0; dim];
    let mut discount = 1.0;
    let length = drive_episode(actor, env, seed, stream, None, |_| weight.clone(), |_, results, active| {
        for (result, _) in results.iter().zip(active).filter(|(_, &a)| a) {
            for (d, r) in result.reward.iter().enumerate() {
                discounted[d] += discount * r;
                undiscounted[d] += r;
            }
        }
        discount *= gamma;
    })?;
    let mean = |v: Vec<f64>| ObjectiveVector::new(v.into_iter().map(|x| x / agents as f64).collect());
    Ok(EpisodeOutcome { discounted: mean(discounted)?, undiscounted: mean(undiscounted)?, length })
}

/// Evaluates an actor on the given weights, `episodes` episodes each.
/// Episode `e` of point `i` uses stream `i·episodes + e`, so results do
/// not depend on `workers`.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_with<A: Actor + ?Sized>(
    actor: &A,
    algorithm: &str,
    env: &EnvConfig,
    weights: &[WeightVector],
    episodes: usize,
    gamma: f64,
    seed: u64,
    workers: usize,
) -> Result<EvaluationRecord> {
    if episodes == 0 {
        return Err(HarnessError::Config("episodes per point must be positive".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..weights.len()).flat_map(|i| (0..episodes).map(move |e| (i, e))).collect();
    let run = |&(i, e): &(usize, usize)| run_episode(actor, env, &weights[i], gamma, seed, (i * episodes + e) as u64);
    let outcomes: Vec<EpisodeOutcome> = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(run).collect::<Result<_>>())?
    } else {
        jobs.iter().map(run).collect::<Result<_>>()?
    };
    let points = weights
        .iter()
        .zip(outcomes.chunks(episodes))
        .map(|(w, chunk)| {
            let dim = chunk[0].discounted.dim();
            let mean = (0..dim)
                .map(|d| chunk.iter().map(|o| o.discounted[d]).sum::<f64>() / episodes as f64)
                .collect();
            Ok(EvaluationPoint { weight: w.clone(), mean_return: ObjectiveVector::new(mean)?, episodes })
        })
        .collect::<Result<_>>()?;
    Ok(EvaluationRecord { algorithm: algorithm.to_string(), conditioned: is_conditioned_id(algorithm), points })
}

/// Evaluates a checkpoint on the weight lattice described by `config`.
///
/// Non-conditioned policies are still paired with each lattice weight; they
/// just never see it.
pub fn evaluate(checkpoint: &PolicyCheckpoint, env: &EnvConfig, config: &EvalConfig) -> Result<EvaluationRecord> {
    config.validate()?;
    let spec = check_compatible(checkpoint, env)?;
    let weights = simplex_lattice(spec.objective_count, config.weight_point_target)?;
    let gamma = config.gamma.unwrap_or(checkpoint.metadata.gamma);
    let actor = CheckpointActor::new(checkpoint, config.deterministic);
    evaluate_with(
        &actor,
        &checkpoint.metadata.variant,
        env,
        &weights,
        config.episodes_per_point,
        gamma,
        config.seed,
        config.workers,
    )
}

/// Writes records in the solution-set CSV format.
pub fn write_records<W: Write>(out: W, records: &[EvaluationRecord]) -> Result<()> {
    let sets = records.iter().map(EvaluationRecord::solution_set).collect::<Result<Vec<_>>>()?;
    Ok(write_solution_csv(out, &sets)?)
}

pub fn read_records<R: BufRead>(input: R) -> Result<Vec<SolutionSet>> {
    Ok(read_solution_csv(input)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use morl_envs::{preference_bandit_optimal_return, EnvKind};

    struct Optimal;

    impl Actor for Optimal {
        fn act(&self, observations: &[Vec<f64>], weight: &WeightVector, _: &mut RngStream) -> Result<Vec<usize>> {
            Ok(vec![weight.argmax(); observations.len()])
        }
    }

    #[test]
    fn optimal_bandit_stub_reproduces_analytic_returns() {
        let weights = simplex_lattice(3, 30).unwrap();
        let env = EnvConfig::of(EnvKind::Bandit);
        let record = evaluate_with(&Optimal, "oracle", &env, &weights, 3, 0.99, 0, 1).unwrap();
        assert_eq!(record.points.len(), 28);
        for p in &record.points {
            assert_eq!(p.mean_return, preference_bandit_optimal_return(&p.weight));
            assert_eq!(p.episodes, 3);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let weights = simplex_lattice(3, 10).unwrap();
        let env = EnvConfig::of(EnvKind::Snake);
        struct Straight;
        impl Actor for Straight {
            fn act(&self, o: &[Vec<f64>], _: &WeightVector, rng: &mut RngStream) -> Result<Vec<usize>> {
                Ok(o.iter().map(|_| rng.below(4)).collect())
            }
        }
        let a = evaluate_with(&Straight, "x", &env, &weights, 2, 0.99, 4, 1).unwrap();
        let b = evaluate_with(&Straight, "x", &env, &weights, 2, 0.99, 4, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn conditioned_ids() {
        assert!(is_conditioned_id("moppo"));
        assert!(is_conditioned_id("moppo:seed3"));
        assert!(!is_conditioned_id("moppo-nocond"));
        assert!(!is_conditioned_id("ppo:tuned"));
        assert!(is_conditioned_id("oracle"));
    }
}
