use morl_core::{ObjectiveVector, RngStream};
use rayon::prelude::*;

use crate::{scalar_reward_view, EnvConfig, EnvError, EnvSpec, MoEnv, Result, StepResult};

/// A batch of independent environment instances addressed by flat agent
/// slots: slot `i` is agent `i % agents` of instance `i / agents`.
///
/// With more than one worker, instances step in parallel on a dedicated
/// thread pool. Each instance owns its own [`RngStream`], so results do not
/// depend on the worker count.
pub struct VecEnv {
    envs: Vec<Box<dyn MoEnv>>,
    spec: EnvSpec,
    pool: Option<rayon::ThreadPool>,
}

impl VecEnv {
    pub fn new(envs: Vec<Box<dyn MoEnv>>, workers: usize) -> Result<Self> {
        let spec = envs.first().ok_or_else(|| EnvError::Config("a batch needs at least one instance".into()))?.spec().clone();
        if envs.iter().any(|e| e.spec() != &spec) {
            return Err(EnvError::Config("all instances in a batch must share one spec".into()));
        }
        let pool = if workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| EnvError::Config(format!("thread pool: {e}")))?;
            Some(pool)
        } else {
            None
        };
        Ok(Self { envs, spec, pool })
    }

    /// Builds `instances` copies of the configured environment, optionally
    /// behind [`scalar_reward_view`].
    pub fn from_config(config: &EnvConfig, instances: usize, workers: usize, scalar: bool) -> Result<Self> {
        let envs = (0..instances)
            .map(|_| {
                let env = config.build()?;
                Ok(if scalar { Box::new(scalar_reward_view(env)) as Box<dyn MoEnv> } else { env })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(envs, workers)
    }

    pub fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    pub fn instance_count(&self) -> usize {
        self.envs.len()
    }

    pub fn slot_count(&self) -> usize {
        self.envs.len() * self.spec.agents_per_instance
    }

    /// Resets instance `i` with `RngStream::new(seed, stream_base + i)`.
    pub fn reset(&mut self, seed: u64, stream_base: u64) -> Vec<Vec<f64>> {
        self.envs
            .iter_mut()
            .enumerate()
            .flat_map(|(i, env)| env.reset(RngStream::new(seed, stream_base + i as u64)))
            .collect()
    }

    pub fn reset_slot(&mut self, slot: usize) -> Result<Vec<f64>> {
        let agents = self.spec.agents_per_instance;
        let count = self.slot_count();
        let env = self.envs.get_mut(slot / agents).ok_or(EnvError::NoSuchAgent { agent: slot, count })?;
        env.reset_agent(slot % agents)
    }

    /// Steps every instance with `actions` indexed by slot.
    pub fn step(&mut self, actions: &[usize]) -> Result<Vec<StepResult>> {
        if actions.len() != self.slot_count() {
            return Err(EnvError::ActionCount { expected: self.slot_count(), got: actions.len() });
        }
        let agents = self.spec.agents_per_instance;
        let chunks: Vec<Result<Vec<StepResult>>> = match &self.pool {
            Some(pool) => pool.install(|| {
                self.envs.par_iter_mut().zip(actions.par_chunks(agents)).map(|(env, a)| env.step(a)).collect()
            }),
            None => self.envs.iter_mut().zip(actions.chunks(agents)).map(|(env, a)| env.step(a)).collect(),
        };
        let mut out = Vec::with_capacity(actions.len());
        for (instance, chunk) in chunks.into_iter().enumerate() {
            out.extend(chunk.map_err(|e| offset_agent(e, instance * agents))?);
        }
        Ok(out)
    }

    /// Vector rewards behind the last step, when instances sit behind a
    /// scalarizing adapter.
    pub fn reward_components(&self) -> Option<Vec<ObjectiveVector>> {
        let mut all = Vec::with_capacity(self.slot_count());
        for env in &self.envs {
            all.extend_from_slice(env.reward_components()?);
        }
        Some(all)
    }
}

/// Rewrites instance-local agent indices in errors into slot indices.
fn offset_agent(e: EnvError, base: usize) -> EnvError {
    match e {
        EnvError::InvalidAction { agent, action, count } => EnvError::InvalidAction { agent: agent + base, action, count },
        EnvError::EpisodeOver(agent) => EnvError::EpisodeOver(agent + base),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::EnvKind;

    fn rollout(workers: usize) -> Vec<StepResult> {
        let mut v = VecEnv::from_config(&EnvConfig::of(EnvKind::Snake), 3, workers, false).unwrap();
        v.reset(42, 0);
        let mut rng = RngStream::new(1, 1);
        let mut all = Vec::new();
        for _ in 0..200 {
            let actions: Vec<usize> = (0..v.slot_count()).map(|_| rng.below(4)).collect();
            let results = v.step(&actions).unwrap();
            for (slot, r) in results.iter().enumerate() {
                if r.done() {
                    v.reset_slot(slot).unwrap();
                }
            }
            all.extend(results);
        }
        all
    }

    #[test]
    fn worker_count_does_not_change_results() {
        assert_eq!(rollout(1), rollout(3));
    }

    #[test]
    fn scalar_batch_keeps_components() {
        let mut v = VecEnv::from_config(&EnvConfig::of(EnvKind::Bandit), 2, 1, true).unwrap();
        v.reset(0, 0);
        let r = v.step(&[0, 2]).unwrap();
        assert_eq!(r[1].reward.as_slice(), &[1.0]);
        let comps = v.reward_components().unwrap();
        assert_eq!(comps[1].as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn errors_name_the_slot() {
        let mut v = VecEnv::from_config(&EnvConfig::of(EnvKind::Bandit), 2, 1, false).unwrap();
        v.reset(0, 0);
        assert_eq!(v.step(&[0, 5]).unwrap_err(), EnvError::InvalidAction { agent: 1, action: 5, count: 3 });
    }
}
