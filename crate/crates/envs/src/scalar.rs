use morl_core::{ObjectiveVector, RngStream};

use crate::{EnvSpec, MoEnv, Result, StepResult};

/// Collapses vector rewards into their sum, the reward a single-objective
/// learner sees. The vector behind each step stays available through
/// [`MoEnv::reward_components`].
#[derive(Debug, Clone)]
pub struct ScalarRewardView<E> {
    inner: E,
    spec: EnvSpec,
    components: Vec<ObjectiveVector>,
}

pub fn scalar_reward_view<E: MoEnv>(env: E) -> ScalarRewardView<E> {
    let mut spec = env.spec().clone();
    spec.objective_count = 1;
    spec.objective_names = vec!["total".into()];
    ScalarRewardView { inner: env, spec, components: Vec::new() }
}

impl<E> ScalarRewardView<E> {
    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn into_inner(self) -> E {
        self.inner
    }
}

impl<E: MoEnv> MoEnv for ScalarRewardView<E> {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, rng: RngStream) -> Vec<Vec<f64>> {
        self.components.clear();
        self.inner.reset(rng)
    }

    fn reset_agent(&mut self, agent: usize) -> Result<Vec<f64>> {
        self.inner.reset_agent(agent)
    }

    fn step(&mut self, actions: &[usize]) -> Result<Vec<StepResult>> {
        let results = self.inner.step(actions)?;
        self.components.clear();
        Ok(results
            .into_iter()
            .map(|mut r| {
                let total = r.reward.sum();
                let vector = std::mem::replace(&mut r.reward, ObjectiveVector::new(vec![total]).expect("finite"));
                self.components.push(vector);
                r
            })
            .collect())
    }

    fn reward_components(&self) -> Option<&[ObjectiveVector]> {
        Some(&self.components)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::EnvError;

    /// Replays a fixed reward vector every step.
    struct Fixed(EnvSpec, Vec<f64>);

    impl MoEnv for Fixed {
        fn spec(&self) -> &EnvSpec {
            &self.0
        }
        fn reset(&mut self, _rng: RngStream) -> Vec<Vec<f64>> {
            vec![vec![0.0]]
        }
        fn reset_agent(&mut self, _agent: usize) -> Result<Vec<f64>> {
            Err(EnvError::NotReset)
        }
        fn step(&mut self, _actions: &[usize]) -> Result<Vec<StepResult>> {
            Ok(vec![StepResult {
                observation: vec![0.0],
                reward: ObjectiveVector::new(self.1.clone()).unwrap(),
                terminated: false,
                truncated: false,
            }])
        }
    }

    fn fixed(reward: &[f64]) -> ScalarRewardView<Fixed> {
        let spec = EnvSpec {
            name: "fixed".into(),
            objective_count: 3,
            objective_names: vec!["a".into(), "b".into(), "c".into()],
            observation_length: 1,
            action_count: 1,
            agents_per_instance: 1,
            max_episode_steps: 10,
            truncation_jitter: 0,
        };
        scalar_reward_view(Fixed(spec, reward.to_vec()))
    }

    #[test]
    fn sums_components() {
        for (vector, total) in [([0.1, 0.0, 0.0], 0.1), ([0.0, 0.01, -1.0], -0.99), ([0.0; 3], 0.0)] {
            let mut env = fixed(&vector);
            env.reset(RngStream::new(0, 0));
            let r = env.step(&[0]).unwrap();
            assert_eq!(r[0].reward.dim(), 1);
            assert!((r[0].reward[0] - total).abs() < 1e-15);
            assert_eq!(env.reward_components().unwrap()[0].as_slice(), &vector);
        }
        assert_eq!(fixed(&[0.0; 3]).spec().objective_count, 1);
    }
}
