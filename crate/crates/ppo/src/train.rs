use std::io::Write;

use morl_core::RngStream;
use morl_envs::EnvConfig;
use morl_nn::{AdamState, CheckpointMetadata, NetworkConfig, PolicyCheckpoint};

use crate::{ppo_update, streams, AlgorithmVariant, Collector, Policy, Result, TrainConfig, UpdateStats};

/// One row of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateLog {
    pub update: usize,
    pub env_steps: u64,
    pub stats: UpdateStats,
    /// Episodes finished during this update's rollout.
    pub episodes: usize,
    /// Per-objective mean returns of those episodes; NaN when none finished.
    pub mean_return: Vec<f64>,
    pub mean_discounted_return: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub checkpoint: PolicyCheckpoint,
    pub log: Vec<UpdateLog>,
}

/// Collect, estimate advantages and update until `total_steps` transitions
/// have been gathered. Calls `on_update` after every update.
pub fn train(
    variant: AlgorithmVariant,
    env: &EnvConfig,
    config: &TrainConfig,
    mut on_update: impl FnMut(&UpdateLog),
) -> Result<TrainOutput> {
    config.validate()?;
    let gamma = config.gamma.unwrap_or_else(|| env.kind.default_gamma());
    let mut collector = Collector::new(env, variant, config.instances, config.workers, config.seed, gamma)?;
    let network = NetworkConfig {
        input_length: collector.observation_length(),
        hidden_sizes: config.hidden_sizes.clone(),
        activation: config.activation,
        action_count: collector.action_count(),
        value_dim: collector.value_dim(),
        condition_on_weights: variant.is_conditioned(),
    };
    let mut policy = Policy::init(network, &mut RngStream::new(config.seed, streams::INIT))?;
    let mut optimizer = AdamState::new(policy.params.len());
    let mut shuffle = RngStream::new(config.seed, streams::SHUFFLE);
    let objectives = collector.objective_count();
    let mut env_steps = 0u64;
    let mut log = Vec::new();
    while env_steps < config.total_steps {
        let buffer = collector.collect(&policy, config.horizon)?;
        env_steps += buffer.len() as u64;
        let stats = ppo_update(&mut policy, &mut optimizer, &buffer, config, gamma, &mut shuffle)?;
        let episodes = buffer.episodes.len();
        let mean = |f: &dyn Fn(&crate::EpisodeStats, usize) -> f64| -> Vec<f64> {
            (0..objectives)
                .map(|d| buffer.episodes.iter().map(|e| f(e, d)).sum::<f64>() / episodes as f64)
                .map(|m| if episodes == 0 { f64::NAN } else { m })
                .collect()
        };
        let entry = UpdateLog {
            update: log.len(),
            env_steps,
            stats,
            episodes,
            mean_return: mean(&|e, d| e.undiscounted[d]),
            mean_discounted_return: mean(&|e, d| e.discounted[d]),
        };
        on_update(&entry);
        log.push(entry);
    }
    let checkpoint = PolicyCheckpoint {
        config: policy.config,
        params: policy.params,
        metadata: CheckpointMetadata {
            variant: variant.name().to_string(),
            env: env.kind.name().to_string(),
            seed: config.seed,
            env_steps,
            gamma,
        },
    };
    Ok(TrainOutput { checkpoint, log })
}

/// `update,env_steps,policy_loss,value_loss,entropy,clip_frac,approx_kl,mean_return_0..,mean_disc_return_0..`
pub fn write_metrics_csv<W: Write>(mut out: W, log: &[UpdateLog]) -> std::io::Result<()> {
    let dim = log.first().map_or(0, |l| l.mean_return.len());
    write!(out, "update,env_steps,policy_loss,value_loss,entropy,clip_frac,approx_kl")?;
    for d in 0..dim {
        write!(out, ",mean_return_{d}")?;
    }
    for d in 0..dim {
        write!(out, ",mean_disc_return_{d}")?;
    }
    writeln!(out)?;
    for l in log {
        let s = &l.stats;
        write!(
            out,
            "{},{},{},{},{},{},{}",
            l.update, l.env_steps, s.policy_loss, s.value_loss, s.entropy, s.clip_fraction, s.approx_kl
        )?;
        for v in l.mean_return.iter().chain(&l.mean_discounted_return) {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    out.flush()
}
