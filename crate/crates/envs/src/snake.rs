use std::collections::VecDeque;

use morl_core::{ObjectiveVector, RngStream};

use crate::clock::EpisodeClock;
use crate::{check_actions, EnvError, EnvSpec, MoEnv, Result, SnakeConfig, StepResult};

/// Observation channels per window cell, in order.
pub const SNAKE_CHANNELS: [&str; 6] = ["empty", "wall", "food", "corpse", "own", "other"];

const FOOD_REWARD: f64 = 0.1;
const CORPSE_REWARD: f64 = 0.01;
const DEATH_REWARD: f64 = -1.0;

const EMPTY: u16 = 0;
const FOOD: u16 = 1;
const CORPSE: u16 = 2;
const BODY: u16 = 3;

/// Absolute movement directions; the action id is the discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnakeAction {
    Up = 0,
    Right = 1,
    Down = 2,
    Left = 3,
}

impl SnakeAction {
    pub const ALL: [SnakeAction; 4] = [SnakeAction::Up, SnakeAction::Right, SnakeAction::Down, SnakeAction::Left];

    pub fn from_id(id: usize) -> Option<Self> {
        Self::ALL.get(id).copied()
    }

    fn delta(self) -> (isize, isize) {
        match self {
            SnakeAction::Up => (-1, 0),
            SnakeAction::Right => (0, 1),
            SnakeAction::Down => (1, 0),
            SnakeAction::Left => (0, -1),
        }
    }

    fn reverse(self) -> Self {
        Self::ALL[(self as usize + 2) % 4]
    }
}

#[derive(Debug, Clone)]
struct Agent {
    /// Front is the head.
    body: VecDeque<usize>,
    heading: SnakeAction,
    running: bool,
    clock: EpisodeClock,
}

/// Multi-agent Snake on a walled grid with objectives (food, corpse, death).
///
/// Agents move one after another in index order within a tick. A snake that
/// does not eat vacates its tail before the collision test, so following
/// its own tail is legal. A dead snake turns into corpse cells, which any
/// snake may eat for a smaller reward.
#[derive(Debug, Clone)]
pub struct Snake {
    config: SnakeConfig,
    spec: EnvSpec,
    grid: Vec<u16>,
    agents: Vec<Agent>,
    /// `(expiry tick, cell)` in death order.
    corpses: VecDeque<(u64, usize)>,
    corpse_expiry: Vec<u64>,
    tick: u64,
    rng: Option<RngStream>,
}

impl Snake {
    pub fn new(config: SnakeConfig) -> Result<Self> {
        let cells = config.width * config.height;
        if config.width < 2 || config.height < 2 {
            return Err(EnvError::Config("snake grid must be at least 2x2".into()));
        }
        if config.view == 0 || config.view.is_multiple_of(2) {
            return Err(EnvError::Config(format!("snake view {} must be odd", config.view)));
        }
        if config.agents == 0 || config.agents + config.food > cells {
            return Err(EnvError::Config(format!(
                "{} agents and {} food do not fit a {}x{} grid",
                config.agents, config.food, config.width, config.height
            )));
        }
        if config.agents > (u16::MAX - BODY) as usize {
            return Err(EnvError::Config(format!("too many snake agents: {}", config.agents)));
        }
        let spec = EnvSpec {
            name: "snake".into(),
            objective_count: 3,
            objective_names: vec!["food".into(), "corpse".into(), "death".into()],
            observation_length: config.view * config.view * SNAKE_CHANNELS.len(),
            action_count: SnakeAction::ALL.len(),
            agents_per_instance: config.agents,
            max_episode_steps: config.max_episode_steps,
            truncation_jitter: config.truncation_jitter,
        };
        spec.validate()?;
        Ok(Self {
            grid: vec![EMPTY; cells],
            agents: Vec::new(),
            corpses: VecDeque::new(),
            corpse_expiry: vec![0; cells],
            tick: 0,
            rng: None,
            spec,
            config,
        })
    }

    pub fn config(&self) -> &SnakeConfig {
        &self.config
    }

    /// Body cells of `agent` as `(row, col)`, head first.
    pub fn body(&self, agent: usize) -> Vec<(usize, usize)> {
        self.agents[agent].body.iter().map(|&i| self.coords(i)).collect()
    }

    pub fn food_cells(&self) -> Vec<(usize, usize)> {
        self.cells_with(FOOD)
    }

    pub fn corpse_cells(&self) -> Vec<(usize, usize)> {
        self.cells_with(CORPSE)
    }

    pub fn is_running(&self, agent: usize) -> bool {
        self.agents.get(agent).is_some_and(|a| a.running)
    }

    fn cells_with(&self, code: u16) -> Vec<(usize, usize)> {
        (0..self.grid.len()).filter(|&i| self.grid[i] == code).map(|i| self.coords(i)).collect()
    }

    fn coords(&self, index: usize) -> (usize, usize) {
        (index / self.config.width, index % self.config.width)
    }

    fn random_empty_cell(&mut self) -> Option<usize> {
        let rng = self.rng.as_mut().expect("reset before sampling");
        let n = self.grid.len();
        for _ in 0..64 {
            let i = rng.below(n);
            if self.grid[i] == EMPTY {
                return Some(i);
            }
        }
        let empty: Vec<usize> = (0..n).filter(|&i| self.grid[i] == EMPTY).collect();
        if empty.is_empty() {
            None
        } else {
            Some(empty[rng.below(empty.len())])
        }
    }

    fn spawn_agent(&mut self, agent: usize) {
        let heading = SnakeAction::ALL[self.rng.as_mut().expect("reset").below(4)];
        let rng = self.rng.as_mut().expect("reset");
        let clock = EpisodeClock::start(&self.spec, rng);
        let mut body = VecDeque::new();
        // On a full board there is nowhere to stand and the agent dies on
        // its first move.
        if let Some(cell) = self.random_empty_cell() {
            self.grid[cell] = BODY + agent as u16;
            body.push_back(cell);
        }
        let state = Agent { body, heading, running: true, clock };
        if agent < self.agents.len() {
            self.agents[agent] = state;
        } else {
            self.agents.push(state);
        }
    }

    fn spawn_food(&mut self) {
        if let Some(cell) = self.random_empty_cell() {
            self.grid[cell] = FOOD;
        }
    }

    fn target(&self, head: usize, dir: SnakeAction) -> Option<usize> {
        let (r, c) = self.coords(head);
        let (dr, dc) = dir.delta();
        let r = r.checked_add_signed(dr)?;
        let c = c.checked_add_signed(dc)?;
        (r < self.config.height && c < self.config.width).then_some(r * self.config.width + c)
    }

    /// Moves one agent and returns its reward.
    fn advance(&mut self, agent: usize, action: SnakeAction) -> ([f64; 3], bool) {
        let state = &self.agents[agent];
        let heading = if state.body.len() > 1 && action == state.heading.reverse() { state.heading } else { action };
        let Some(&head) = state.body.front() else {
            return ([0.0, 0.0, DEATH_REWARD], true);
        };
        self.agents[agent].heading = heading;
        let Some(next) = self.target(head, heading) else {
            self.kill(agent);
            return ([0.0, 0.0, DEATH_REWARD], true);
        };
        let mut reward = [0.0; 3];
        match self.grid[next] {
            FOOD => {
                reward[0] = FOOD_REWARD;
                self.grid[next] = BODY + agent as u16;
                self.agents[agent].body.push_front(next);
                self.spawn_food();
            }
            CORPSE => {
                reward[1] = CORPSE_REWARD;
                self.grid[next] = BODY + agent as u16;
                self.agents[agent].body.push_front(next);
            }
            _ => {
                let tail = self.agents[agent].body.pop_back().expect("non-empty body");
                self.grid[tail] = EMPTY;
                if self.grid[next] >= BODY {
                    self.kill(agent);
                    return ([0.0, 0.0, DEATH_REWARD], true);
                }
                self.grid[next] = BODY + agent as u16;
                self.agents[agent].body.push_front(next);
            }
        }
        (reward, false)
    }

    fn kill(&mut self, agent: usize) {
        let expiry = self.tick + self.config.corpse_lifetime as u64;
        for &cell in &self.agents[agent].body {
            self.grid[cell] = CORPSE;
            if self.config.corpse_lifetime > 0 {
                self.corpse_expiry[cell] = expiry;
                self.corpses.push_back((expiry, cell));
            }
        }
        self.agents[agent].body.clear();
    }

    fn decay_corpses(&mut self) {
        while let Some(&(expiry, cell)) = self.corpses.front() {
            if expiry > self.tick {
                break;
            }
            self.corpses.pop_front();
            // The cell may have been eaten and reused since.
            if self.grid[cell] == CORPSE && self.corpse_expiry[cell] == expiry {
                self.grid[cell] = EMPTY;
            }
        }
    }

    fn observe(&self, agent: usize) -> Vec<f64> {
        let view = self.config.view;
        let half = (view / 2) as isize;
        let channels = SNAKE_CHANNELS.len();
        let mut obs = vec![0.0; view * view * channels];
        let (hr, hc) = match self.agents[agent].body.front() {
            Some(&h) => self.coords(h),
            None => {
                // Dead: the whole window reads as wall.
                for cell in 0..view * view {
                    obs[cell * channels + 1] = 1.0;
                }
                return obs;
            }
        };
        let own = BODY + agent as u16;
        for dr in -half..=half {
            for dc in -half..=half {
                let r = hr as isize + dr;
                let c = hc as isize + dc;
                let channel = if r < 0 || c < 0 || r >= self.config.height as isize || c >= self.config.width as isize {
                    1
                } else {
                    match self.grid[r as usize * self.config.width + c as usize] {
                        EMPTY => 0,
                        FOOD => 2,
                        CORPSE => 3,
                        code if code == own => 4,
                        _ => 5,
                    }
                };
                let cell = ((dr + half) as usize) * view + (dc + half) as usize;
                obs[cell * channels + channel] = 1.0;
            }
        }
        obs
    }
}

impl MoEnv for Snake {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&mut self, rng: RngStream) -> Vec<Vec<f64>> {
        self.rng = Some(rng);
        self.grid.fill(EMPTY);
        self.agents.clear();
        self.corpses.clear();
        self.tick = 0;
        for agent in 0..self.config.agents {
            self.spawn_agent(agent);
        }
        for _ in 0..self.config.food {
            self.spawn_food();
        }
        (0..self.config.agents).map(|a| self.observe(a)).collect()
    }

    fn reset_agent(&mut self, agent: usize) -> Result<Vec<f64>> {
        if self.rng.is_none() {
            return Err(EnvError::NotReset);
        }
        let count = self.config.agents;
        let state = self.agents.get(agent).ok_or(EnvError::NoSuchAgent { agent, count })?;
        if state.running {
            return Err(EnvError::AgentRunning(agent));
        }
        // A truncated snake leaves the board without a corpse.
        for cell in std::mem::take(&mut self.agents[agent].body) {
            self.grid[cell] = EMPTY;
        }
        self.spawn_agent(agent);
        Ok(self.observe(agent))
    }

    fn step(&mut self, actions: &[usize]) -> Result<Vec<StepResult>> {
        check_actions(&self.spec, actions)?;
        if self.rng.is_none() {
            return Err(EnvError::NotReset);
        }
        if let Some(agent) = self.agents.iter().position(|a| !a.running) {
            return Err(EnvError::EpisodeOver(agent));
        }
        self.tick += 1;
        self.decay_corpses();
        let mut outcomes = Vec::with_capacity(actions.len());
        for (agent, &action) in actions.iter().enumerate() {
            let action = SnakeAction::from_id(action).expect("checked");
            outcomes.push(self.advance(agent, action));
        }
        let mut results = Vec::with_capacity(actions.len());
        for (agent, (reward, terminated)) in outcomes.into_iter().enumerate() {
            let horizon = self.agents[agent].clock.tick();
            let truncated = horizon && !terminated;
            self.agents[agent].running = !(terminated || truncated);
            results.push(StepResult {
                observation: self.observe(agent),
                reward: ObjectiveVector::new(reward.to_vec()).expect("finite"),
                terminated,
                truncated,
            });
        }
        Ok(results)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(agents: usize, food: usize) -> Snake {
        Snake::new(SnakeConfig { width: 6, height: 5, agents, food, view: 5, ..SnakeConfig::default() }).unwrap()
    }

    /// Places agent bodies and food by hand after a reset.
    fn arrange(env: &mut Snake, bodies: &[&[(usize, usize)]], headings: &[SnakeAction], food: &[(usize, usize)]) {
        env.grid.fill(EMPTY);
        let w = env.config.width;
        for (a, body) in bodies.iter().enumerate() {
            env.agents[a].body = body.iter().map(|&(r, c)| r * w + c).collect();
            env.agents[a].heading = headings[a];
            for &(r, c) in body.iter() {
                env.grid[r * w + c] = BODY + a as u16;
            }
        }
        for &(r, c) in food {
            env.grid[r * w + c] = FOOD;
        }
    }

    #[test]
    fn eating_food_rewards_and_grows() {
        let mut env = small(1, 1);
        env.reset(RngStream::new(1, 0));
        arrange(&mut env, &[&[(2, 2)]], &[SnakeAction::Right], &[(2, 3)]);
        let r = env.step(&[SnakeAction::Right as usize]).unwrap();
        assert_eq!(r[0].reward.as_slice(), &[0.1, 0.0, 0.0]);
        assert!(!r[0].done());
        assert_eq!(env.body(0), vec![(2, 3), (2, 2)]);
        assert_eq!(env.food_cells().len(), 1);
        assert_ne!(env.food_cells()[0], (2, 3));
    }

    #[test]
    fn wall_collision_kills() {
        let mut env = small(1, 1);
        env.reset(RngStream::new(1, 0));
        arrange(&mut env, &[&[(0, 2), (1, 2)]], &[SnakeAction::Up], &[(4, 5)]);
        let r = env.step(&[SnakeAction::Up as usize]).unwrap();
        assert_eq!(r[0].reward.as_slice(), &[0.0, 0.0, -1.0]);
        assert!(r[0].terminated && !r[0].truncated);
        assert_eq!(env.corpse_cells(), vec![(0, 2), (1, 2)]);
        assert_eq!(env.step(&[0]).unwrap_err(), EnvError::EpisodeOver(0));
        env.reset_agent(0).unwrap();
        assert_eq!(env.body(0).len(), 1);
    }

    #[test]
    fn corpse_is_edible() {
        let mut env = small(1, 0);
        env.reset(RngStream::new(1, 0));
        arrange(&mut env, &[&[(2, 2)]], &[SnakeAction::Down], &[]);
        env.grid[3 * 6 + 2] = CORPSE;
        let r = env.step(&[SnakeAction::Down as usize]).unwrap();
        assert_eq!(r[0].reward.as_slice(), &[0.0, 0.01, 0.0]);
        assert_eq!(env.body(0).len(), 2);
    }

    #[test]
    fn corpses_decay_after_lifetime() {
        let config = SnakeConfig { width: 6, height: 5, agents: 1, food: 0, view: 5, corpse_lifetime: 3, ..SnakeConfig::default() };
        let mut env = Snake::new(config).unwrap();
        env.reset(RngStream::new(1, 0));
        arrange(&mut env, &[&[(0, 1), (1, 1)]], &[SnakeAction::Up], &[]);
        env.step(&[SnakeAction::Up as usize]).unwrap();
        assert_eq!(env.corpse_cells().len(), 2);
        env.tick = 3;
        env.decay_corpses();
        assert_eq!(env.corpse_cells().len(), 2);
        env.tick = 4;
        env.decay_corpses();
        assert!(env.corpse_cells().is_empty());
    }

    #[test]
    fn reversing_into_neck_continues_straight() {
        let mut env = small(1, 0);
        env.reset(RngStream::new(1, 0));
        arrange(&mut env, &[&[(2, 3), (2, 2)]], &[SnakeAction::Right], &[]);
        let r = env.step(&[SnakeAction::Left as usize]).unwrap();
        assert!(!r[0].done());
        assert_eq!(env.body(0), vec![(2, 4), (2, 3)]);
    }

    #[test]
    fn following_own_tail_is_legal() {
        let mut env = small(1, 0);
        env.reset(RngStream::new(1, 0));
        // A 2x2 loop: head (1,1) moving up into tail (0,1).
        arrange(&mut env, &[&[(1, 1), (1, 2), (0, 2), (0, 1)]], &[SnakeAction::Left], &[]);
        let r = env.step(&[SnakeAction::Up as usize]).unwrap();
        assert!(!r[0].done());
        assert_eq!(env.body(0), vec![(0, 1), (1, 1), (1, 2), (0, 2)]);
    }

    #[test]
    fn head_on_other_body_kills_mover_only() {
        let mut env = small(2, 0);
        env.reset(RngStream::new(1, 0));
        arrange(
            &mut env,
            &[&[(2, 1)], &[(1, 2), (2, 2), (3, 2)]],
            &[SnakeAction::Right, SnakeAction::Up],
            &[],
        );
        let r = env.step(&[SnakeAction::Right as usize, SnakeAction::Up as usize]).unwrap();
        // Agent 1 moves after agent 0 died; (2,2) was still its own body.
        assert!(r[0].terminated);
        assert!(!r[1].done());
        assert_eq!(env.body(1), vec![(0, 2), (1, 2), (2, 2)]);
    }

    #[test]
    fn observation_is_one_hot_and_egocentric() {
        let mut env = small(1, 1);
        env.reset(RngStream::new(1, 0));
        arrange(&mut env, &[&[(0, 0)]], &[SnakeAction::Right], &[(0, 1)]);
        let obs = env.observe(0);
        let view = 5;
        for cell in 0..view * view {
            let s: f64 = obs[cell * 6..cell * 6 + 6].iter().sum();
            assert_eq!(s, 1.0);
        }
        let at = |r: usize, c: usize, ch: usize| obs[(r * view + c) * 6 + ch];
        assert_eq!(at(2, 2, 4), 1.0);
        assert_eq!(at(2, 3, 2), 1.0);
        assert_eq!(at(1, 2, 1), 1.0);
        assert_eq!(at(2, 1, 1), 1.0);
        assert_eq!(at(3, 3, 0), 1.0);
    }

    #[test]
    fn reset_is_deterministic() {
        let mut a = Snake::new(SnakeConfig::default()).unwrap();
        let mut b = Snake::new(SnakeConfig::default()).unwrap();
        assert_eq!(a.reset(RngStream::new(9, 3)), b.reset(RngStream::new(9, 3)));
        assert_eq!(a.grid, b.grid);
        let mut c = Snake::new(SnakeConfig::default()).unwrap();
        c.reset(RngStream::new(10, 3));
        assert_ne!(a.grid, c.grid);
    }

    #[test]
    fn reset_agent_rejects_running_agent() {
        let mut env = small(2, 1);
        env.reset(RngStream::new(1, 0));
        assert_eq!(env.reset_agent(1).unwrap_err(), EnvError::AgentRunning(1));
        assert!(matches!(env.reset_agent(2), Err(EnvError::NoSuchAgent { .. })));
    }
}
