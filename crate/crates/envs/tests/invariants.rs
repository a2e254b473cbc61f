use std::collections::HashSet;

use morl_core::{simplex_lattice, RngStream};
use morl_envs::{
    preference_bandit_optimal_return, BanditConfig, EnvConfig, EnvKind, MoEnv, PreferenceBandit, Snake, SnakeConfig,
    StepResult, Tetris, TetrisConfig,
};
use morl_metrics::{controllability, CorrelationMethod, SolutionSet};

/// Random-action rollout with per-agent restarts; returns every step result.
fn random_rollout(env: &mut dyn MoEnv, seed: u64, ticks: usize) -> Vec<StepResult> {
    env.reset(RngStream::new(seed, 0));
    let mut actions_rng = RngStream::new(seed, 99);
    let spec = env.spec().clone();
    let mut out = Vec::new();
    for _ in 0..ticks {
        let actions: Vec<usize> = (0..spec.agents_per_instance).map(|_| actions_rng.below(spec.action_count)).collect();
        let results = env.step(&actions).unwrap();
        for (agent, r) in results.iter().enumerate() {
            if r.done() {
                env.reset_agent(agent).unwrap();
            }
        }
        out.extend(results);
    }
    out
}

#[test]
fn fixed_seed_reproduces_streams_bit_for_bit() {
    for kind in [EnvKind::Bandit, EnvKind::Snake, EnvKind::Tetris] {
        let config = EnvConfig::of(kind);
        let a = random_rollout(&mut config.build().unwrap(), 5, 1500);
        let b = random_rollout(&mut config.build().unwrap(), 5, 1500);
        assert!(a.iter().zip(&b).all(|(x, y)| {
            x.observation.iter().map(|v| v.to_bits()).eq(y.observation.iter().map(|v| v.to_bits()))
                && x.reward.iter().map(|v| v.to_bits()).eq(y.reward.iter().map(|v| v.to_bits()))
                && x.terminated == y.terminated
                && x.truncated == y.truncated
        }));
        let c = random_rollout(&mut config.build().unwrap(), 6, 1500);
        if kind != EnvKind::Bandit {
            assert_ne!(a, c, "{kind}");
        }
    }
}

#[test]
fn step_results_respect_spec() {
    for kind in [EnvKind::Bandit, EnvKind::Snake, EnvKind::Tetris] {
        let mut env = EnvConfig::of(kind).build().unwrap();
        let spec = env.spec().clone();
        for r in random_rollout(&mut env, 1, 1000) {
            assert_eq!(r.reward.dim(), spec.objective_count);
            assert_eq!(r.observation.len(), spec.observation_length);
            assert!(!(r.terminated && r.truncated));
        }
    }
}

#[test]
fn snake_cells_never_overlap_and_food_is_conserved() {
    let config = SnakeConfig::default();
    let mut env = Snake::new(config.clone()).unwrap();
    env.reset(RngStream::new(11, 0));
    let mut rng = RngStream::new(11, 1);
    let mut lengths = vec![0usize; config.agents];
    let mut episode_steps = vec![0usize; config.agents];
    let limit = env.spec().episode_step_limit();
    for _ in 0..5000 {
        let actions: Vec<usize> = (0..config.agents).map(|_| rng.below(4)).collect();
        let results = env.step(&actions).unwrap();
        let mut seen = HashSet::new();
        for a in 0..config.agents {
            for cell in env.body(a) {
                assert!(seen.insert(cell), "body overlap at {cell:?}");
            }
        }
        for cell in env.food_cells().into_iter().chain(env.corpse_cells()) {
            assert!(seen.insert(cell), "item overlaps a body at {cell:?}");
        }
        assert_eq!(env.food_cells().len(), config.food, "corpses {} bodies {:?}", env.corpse_cells().len(), (0..config.agents).map(|a| env.body(a).len()).collect::<Vec<_>>());
        for (a, r) in results.iter().enumerate() {
            episode_steps[a] += 1;
            assert!(episode_steps[a] <= limit);
            if r.done() {
                episode_steps[a] = 0;
                env.reset_agent(a).unwrap();
                lengths[a] = 1;
            } else {
                let grown = env.body(a).len();
                let expected = lengths[a].max(1) + (r.reward[0] > 0.0 || r.reward[1] > 0.0) as usize;
                if lengths[a] > 0 {
                    assert_eq!(grown, expected);
                }
                lengths[a] = grown;
            }
        }
    }
}

#[test]
fn snake_horizons_are_jittered_within_bounds() {
    // Agents that never die: one agent on a big empty grid circling a square.
    let config = SnakeConfig { width: 8, height: 8, agents: 1, food: 0, max_episode_steps: 40, truncation_jitter: 10, ..SnakeConfig::default() };
    let mut horizons = HashSet::new();
    for seed in 0..40 {
        let mut env = Snake::new(config.clone()).unwrap();
        env.reset(RngStream::new(seed, 0));
        let (r0, c0) = env.body(0)[0];
        // Walk a 2x2 cycle that stays on the board.
        let cycle = match (r0 < 7, c0 < 7) {
            (true, true) => [1, 2, 3, 0],
            (true, false) => [3, 2, 1, 0],
            (false, true) => [1, 0, 3, 2],
            (false, false) => [3, 0, 1, 2],
        };
        let mut t = 0;
        loop {
            let r = env.step(&[cycle[t % 4]]).unwrap();
            t += 1;
            assert!(!r[0].terminated, "seed {seed} died");
            if r[0].truncated {
                break;
            }
        }
        assert!((30..=50).contains(&t));
        horizons.insert(t);
    }
    assert!(horizons.len() > 5);
}

#[test]
fn tetris_invariants_hold_under_random_play() {
    let config = TetrisConfig::default();
    let cells = config.width * config.height;
    let mut env = Tetris::new(config).unwrap();
    env.reset(RngStream::new(3, 0));
    let mut rng = RngStream::new(3, 1);
    let mut episodes = 0;
    let mut steps = 0;
    while episodes < 20 {
        let before = env.lines_cleared();
        let r = env.step(&[rng.below(6)]).unwrap().remove(0);
        steps += 1;
        let cleared = env.lines_cleared() - before;
        assert!(cleared <= 4);
        assert_eq!(r.reward[0], 0.25 * cleared as f64);
        assert!(env.occupied_cells() <= cells);
        assert!(steps <= env.spec().episode_step_limit());
        if r.done() {
            env.reset_agent(0).unwrap();
            episodes += 1;
            steps = 0;
        }
    }
}

#[test]
fn tetris_reset_starts_empty_with_bag_piece() {
    let mut env = Tetris::new(TetrisConfig::default()).unwrap();
    let mut firsts = HashSet::new();
    for seed in 0..50 {
        let obs = env.reset(RngStream::new(seed, 0)).remove(0);
        assert_eq!(env.occupied_cells(), 0);
        assert!(obs[..200].iter().all(|&v| v == 0.0));
        firsts.insert(env.current_piece());
    }
    assert_eq!(firsts.len(), 7);
}

/// Pearson correlation of average ranks, computed without any shared code.
fn naive_spearman(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|&a| {
                let below = v.iter().filter(|&&b| b < a).count() as f64;
                let equal = v.iter().filter(|&&b| b == a).count() as f64;
                below + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum::<f64>().sqrt();
    let sy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum::<f64>().sqrt();
    cov / (sx * sy)
}

#[test]
fn bandit_oracle_mapping_through_controllability() {
    let mut env = PreferenceBandit::new(BanditConfig::default()).unwrap();
    let lattice = simplex_lattice(3, 30).unwrap();
    let mut pairs = Vec::new();
    for w in lattice {
        env.reset(RngStream::new(0, 0));
        let r = env.step(&[w.argmax()]).unwrap().remove(0);
        assert_eq!(r.reward, preference_bandit_optimal_return(&w));
        pairs.push((w, r.reward));
    }
    let set = SolutionSet::from_pairs("oracle", pairs.clone()).unwrap();
    let report = controllability(&set, CorrelationMethod::Spearman).unwrap();
    for d in 0..3 {
        let w: Vec<f64> = pairs.iter().map(|(w, _)| w.as_slice()[d]).collect();
        let v: Vec<f64> = pairs.iter().map(|(_, v)| v[d]).collect();
        let rho = report.per_objective[d].unwrap();
        assert!((rho.coefficient - naive_spearman(&w, &v)).abs() < 1e-12);
        assert!(rho.coefficient > 0.7 && rho.p_value < 0.001, "{d}: {rho:?}");
    }
}
