use morl_core::{ObjectiveVector, RngStream, WeightVector};

use crate::{check_actions, BanditConfig, EnvError, EnvSpec, MoEnv, Result, StepResult};

const OBJECTIVES: usize = 3;

/// Stateless three-armed bandit: arm `a` pays the unit vector `e_a`.
///
/// The optimal preference-conditioned policy pulls the arm with the largest
/// weight, so the weight-to-return mapping is known in closed form (see
/// [`preference_bandit_optimal_return`]).
#[derive(Debug, Clone)]
pub struct PreferenceBandit {
    spec: EnvSpec,
    steps: usize,
    running: bool,
}

impl PreferenceBandit {
    pub fn new(config: BanditConfig) -> Result<Self> {
        if config.episode_steps == 0 {
            return Err(EnvError::Config("bandit episode_steps must be positive".into()));
        }
        let spec = EnvSpec {
            name: "bandit".into(),
            objective_count: OBJECTIVES,
            objective_names: (0..OBJECTIVES).map(|d| format!("arm_{d}")).collect(),
            observation_length: 1,
            action_count: OBJECTIVES,
            agents_per_instance: 1,
            max_episode_steps: config.episode_steps,
            truncation_jitter: 0,
        };
        spec.validate()?;
        Ok(Self { spec, steps: 0, running: false })
    }

    fn observation() -> Vec<f64> {
        vec![1.0]
    }
}

impl MoEnv for PreferenceBandit {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, _rng: RngStream) -> Vec<Vec<f64>> {
        self.steps = 0;
        self.running = true;
        vec![Self::observation()]
    }

    fn reset_agent(&mut self, agent: usize) -> Result<Vec<f64>> {
        if agent != 0 {
            return Err(EnvError::NoSuchAgent { agent, count: 1 });
        }
        self.steps = 0;
        self.running = true;
        Ok(Self::observation())
    }

    fn step(&mut self, actions: &[usize]) -> Result<Vec<StepResult>> {
        check_actions(&self.spec, actions)?;
        if !self.running {
            return Err(if self.steps == 0 { EnvError::NotReset } else { EnvError::EpisodeOver(0) });
        }
        let mut reward = vec![0.0; OBJECTIVES];
        reward[actions[0]] = 1.0;
        self.steps += 1;
        let terminated = self.steps >= self.spec.max_episode_steps;
        self.running = !terminated;
        Ok(vec![StepResult {
            observation: Self::observation(),
            reward: ObjectiveVector::new(reward).expect("finite"),
            terminated,
            truncated: false,
        }])
    }
}

/// Per-episode return of the optimal conditioned policy in the one-step
/// bandit: `e_{argmax w}`, lowest index on ties.
pub fn preference_bandit_optimal_return(w: &WeightVector) -> ObjectiveVector {
    let mut v = vec![0.0; w.dim()];
    v[w.argmax()] = 1.0;
    ObjectiveVector::new(v).expect("finite")
}
