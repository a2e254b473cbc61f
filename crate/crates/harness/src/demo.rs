use std::io::Write;

use morl_core::WeightVector;
use morl_envs::EnvConfig;
use serde::{Deserialize, Serialize};

use crate::evaluate::drive_episode;
use crate::{Actor, HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchPoint {
    pub step: usize,
    pub weight: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemoConfig {
    /// Weight before the first switch; uniform when empty.
    pub initial_weight: Vec<f64>,
    pub schedule: Vec<SwitchPoint>,
    pub horizon: usize,
    /// Episode length for the demo only; the environment's own limit when unset.
    pub episode_steps: Option<usize>,
    pub deterministic: bool,
    pub seed: u64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            initial_weight: Vec::new(),
            schedule: Vec::new(),
            horizon: 1000,
            episode_steps: None,
            deterministic: true,
            seed: 0,
        }
    }
}

impl DemoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.episode_steps == Some(0) {
            return Err(HarnessError::Config("demo: horizon and episode_steps must be positive".into()));
        }
        check_schedule(self.schedule.iter().map(|s| s.step), self.horizon)
    }

    /// `env` with this demo's episode length applied. The length replaces
    /// the bandit episode length, or the Snake/Tetris step limit with
    /// truncation jitter removed.
    pub fn demo_env(&self, env: &EnvConfig) -> EnvConfig {
        let mut env = env.clone();
        if let Some(n) = self.episode_steps {
            env.bandit.episode_steps = n;
            env.snake.max_episode_steps = n;
            env.snake.truncation_jitter = 0;
            env.tetris.max_episode_steps = n;
            env.tetris.truncation_jitter = 0;
        }
        env
    }

    /// Initial weight and switch list for `dim` objectives.
    pub fn resolve(&self, dim: usize) -> Result<(WeightVector, Vec<(usize, WeightVector)>)> {
        let initial = if self.initial_weight.is_empty() {
            WeightVector::uniform(dim)
        } else {
            WeightVector::new(self.initial_weight.clone())?
        };
        let schedule = self
            .schedule
            .iter()
            .map(|s| Ok((s.step, WeightVector::new(s.weight.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        Ok((initial, schedule))
    }
}

fn check_schedule(steps: impl Iterator<Item = usize>, horizon: usize) -> Result<()> {
    let mut previous = None;
    for step in steps {
        if step >= horizon {
            return Err(HarnessError::ScheduleBeyondHorizon { step, horizon });
        }
        if previous.is_some_and(|p| step <= p) {
            return Err(HarnessError::Config(format!("demo: switch steps must increase, {step} follows {}", previous.unwrap())));
        }
        previous = Some(step);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoStep {
    pub step: usize,
    pub segment: usize,
    /// Per-objective reward averaged over agents still in their episode.
    pub reward: Vec<f64>,
}

/// A stretch of steps under one conditioning weight.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoSegment {
    pub start: usize,
    /// One past the last step actually taken in this segment.
    pub end: usize,
    pub weight: WeightVector,
    /// Per-step reward rate; NaN when the episode ended before the segment began.
    pub mean_reward: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoLog {
    pub steps: Vec<DemoStep>,
    pub segments: Vec<DemoSegment>,
}

/// Runs one episode for at most `horizon` steps, switching the conditioning
/// weight at each scheduled step. A switch at step 0 replaces `initial`.
pub fn dynamic_demo<A: Actor + ?Sized>(
    actor: &A,
    env: &EnvConfig,
    initial: &WeightVector,
    schedule: &[(usize, WeightVector)],
    horizon: usize,
    seed: u64,
) -> Result<DemoLog> {
    check_schedule(schedule.iter().map(|s| s.0), horizon)?;
    let spec = env.spec()?;
    let dim = spec.objective_count;
    let mut plan: Vec<(usize, WeightVector)> = vec![(0, initial.clone())];
    for (step, w) in schedule {
        if w.dim() != dim || initial.dim() != dim {
            return Err(HarnessError::Config(format!("demo: weights must have {dim} components")));
        }
        if *step == 0 {
            plan[0].1 = w.clone();
        } else {
            plan.push((*step, w.clone()));
        }
    }
    let segment_of = |step: usize| plan.iter().rposition(|(start, _)| *start <= step).unwrap_or(0);
    let mut steps = Vec::new();
    drive_episode(actor, env, seed, 0, Some(horizon), |step| plan[segment_of(step)].1.clone(), |step, results, active| {
        let live: Vec<_> = results.iter().zip(active).filter(|(_, &a)| a).map(|(r, _)| r).collect();
        let reward = (0..dim).map(|d| live.iter().map(|r| r.reward[d]).sum::<f64>() / live.len() as f64).collect();
        steps.push(DemoStep { step, segment: segment_of(step), reward });
    })?;
    let taken = steps.len();
    let segments = plan
        .iter()
        .enumerate()
        .map(|(i, (start, weight))| {
            let end = plan.get(i + 1).map_or(taken, |next| next.0.min(taken)).max((*start).min(taken));
            let window = &steps[(*start).min(taken)..end];
            let mean_reward = (0..dim)
                .map(|d| window.iter().map(|s| s.reward[d]).sum::<f64>() / window.len() as f64)
                .collect();
            DemoSegment { start: *start, end, weight: weight.clone(), mean_reward }
        })
        .collect();
    Ok(DemoLog { steps, segments })
}

/// `step,segment,w_0..,r_0..,avg_0..` where `avg` is the running mean
/// reward since the segment began.
pub fn write_demo_csv<W: Write>(mut out: W, log: &DemoLog) -> Result<()> {
    let dim = log.segments.first().map_or(0, |s| s.weight.dim());
    let mut header = vec!["step".to_string(), "segment".to_string()];
    for prefix in ["w", "r", "avg"] {
        header.extend((0..dim).map(|d| format!("{prefix}_{d}")));
    }
    writeln!(out, "{}", header.join(","))?;
    let mut sums = vec![0.0; dim];
    let mut count = 0usize;
    let mut current = usize::MAX;
    for s in &log.steps {
        if s.segment != current {
            current = s.segment;
            sums.iter_mut().for_each(|x| *x = 0.0);
            count = 0;
        }
        count += 1;
        let mut fields = vec![s.step.to_string(), s.segment.to_string()];
        fields.extend(log.segments[s.segment].weight.iter().map(|w| w.to_string()));
        fields.extend(s.reward.iter().map(|r| r.to_string()));
        for (sum, r) in sums.iter_mut().zip(&s.reward) {
            *sum += r;
        }
        fields.extend(sums.iter().map(|x| (x / count as f64).to_string()));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
