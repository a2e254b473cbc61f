use morl_core::RngStream;
use morl_ppo::{vector_gae, Minibatch, RolloutBuffer};
use ndarray::Array2;

/// Random buffer; each slot's episodes end by termination, including at the
/// last step, so no bootstrap value is involved.
fn episodic_buffer(rng: &mut RngStream, horizon: usize, slots: usize, dim: usize) -> RolloutBuffer {
    let mut b = RolloutBuffer::zeros(horizon, slots, 1, dim);
    b.rewards = Array2::from_shape_fn((horizon * slots, dim), |_| rng.uniform() * 2.0 - 1.0);
    b.values = Array2::from_shape_fn((horizon * slots, dim), |_| rng.uniform() * 2.0 - 1.0);
    for t in 0..horizon {
        for s in 0..slots {
            b.terminated[t * slots + s] = t + 1 == horizon || rng.uniform() < 0.15;
        }
    }
    b
}

#[test]
fn lambda_one_is_monte_carlo_minus_baseline() {
    let mut rng = RngStream::new(1, 0);
    for _ in 0..50 {
        let (h, n, d) = (1 + rng.below(40), 1 + rng.below(5), 1 + rng.below(4));
        let gamma = rng.uniform() * 0.999;
        let b = episodic_buffer(&mut rng, h, n, d);
        let (adv, targets) = vector_gae(&b, gamma, 1.0).unwrap();
        for s in 0..n {
            for k in 0..d {
                let mut g = 0.0;
                for t in (0..h).rev() {
                    let i = t * n + s;
                    if b.terminated[i] {
                        g = 0.0;
                    }
                    g = b.rewards[[i, k]] + gamma * g;
                    assert!((adv[[i, k]] - (g - b.values[[i, k]])).abs() < 1e-10);
                    assert!((targets[[i, k]] - g).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn lambda_zero_is_one_step_residual() {
    let mut rng = RngStream::new(2, 0);
    for _ in 0..50 {
        let (h, n, d) = (1 + rng.below(40), 1 + rng.below(5), 1 + rng.below(4));
        let gamma = rng.uniform() * 0.999;
        let mut b = episodic_buffer(&mut rng, h, n, d);
        // Let the final step run on so the last value bootstraps.
        for s in 0..n {
            b.terminated[(h - 1) * n + s] = rng.uniform() < 0.5;
        }
        b.last_values = Array2::from_shape_fn((n, d), |_| rng.uniform());
        let (adv, _) = vector_gae(&b, gamma, 0.0).unwrap();
        for t in 0..h {
            for s in 0..n {
                let i = t * n + s;
                for k in 0..d {
                    let next = if b.terminated[i] {
                        0.0
                    } else if t + 1 == h {
                        b.last_values[[s, k]]
                    } else {
                        b.values[[i + n, k]]
                    };
                    let delta = b.rewards[[i, k]] + gamma * next - b.values[[i, k]];
                    assert!((adv[[i, k]] - delta).abs() < 1e-10);
                }
            }
        }
    }
}

/// Textbook single-stream GAE over `(reward, value, done)` with a final
/// bootstrap value.
fn scalar_gae(rewards: &[f64], values: &[f64], dones: &[bool], last: f64, gamma: f64, lambda: f64) -> Vec<f64> {
    let mut adv = vec![0.0; rewards.len()];
    let mut gae = 0.0;
    for t in (0..rewards.len()).rev() {
        let not_done = if dones[t] { 0.0 } else { 1.0 };
        let next = if t + 1 == rewards.len() { last } else { values[t + 1] };
        let delta = rewards[t] + gamma * next * not_done - values[t];
        gae = delta + gamma * lambda * not_done * gae;
        adv[t] = gae;
    }
    adv
}

#[test]
fn one_objective_matches_scalar_reference() {
    let mut rng = RngStream::new(3, 0);
    for _ in 0..50 {
        let (h, n) = (1 + rng.below(60), 1 + rng.below(6));
        let (gamma, lambda) = (rng.uniform() * 0.999, rng.uniform());
        let mut b = episodic_buffer(&mut rng, h, n, 1);
        for s in 0..n {
            b.terminated[(h - 1) * n + s] = rng.uniform() < 0.5;
        }
        b.last_values = Array2::from_shape_fn((n, 1), |_| rng.uniform());
        let (adv, _) = vector_gae(&b, gamma, lambda).unwrap();
        for s in 0..n {
            let col = |a: &Array2<f64>| (0..h).map(|t| a[[t * n + s, 0]]).collect::<Vec<_>>();
            let dones: Vec<bool> = (0..h).map(|t| b.terminated[t * n + s]).collect();
            let reference = scalar_gae(&col(&b.rewards), &col(&b.values), &dones, b.last_values[[s, 0]], gamma, lambda);
            for (x, y) in col(&adv).iter().zip(&reference) {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
        }
    }
}

#[test]
fn uniform_weights_scalarize_like_summed_stream() {
    let mut rng = RngStream::new(4, 0);
    for _ in 0..20 {
        let (h, n, d) = (2 + rng.below(30), 1 + rng.below(4), 2 + rng.below(3));
        let (gamma, lambda) = (rng.uniform() * 0.99, rng.uniform());
        let mut vector = episodic_buffer(&mut rng, h, n, d);
        vector.weights = Array2::from_elem((h * n, d), 1.0 / d as f64);
        vector.last_values = Array2::from_shape_fn((n, d), |_| rng.uniform());
        let mut scalar = RolloutBuffer::zeros(h, n, 1, 1);
        scalar.terminated = vector.terminated.clone();
        scalar.rewards = vector.rewards.sum_axis(ndarray::Axis(1)).insert_axis(ndarray::Axis(1));
        scalar.values = vector.values.sum_axis(ndarray::Axis(1)).insert_axis(ndarray::Axis(1));
        scalar.last_values = vector.last_values.sum_axis(ndarray::Axis(1)).insert_axis(ndarray::Axis(1));
        scalar.weights = Array2::ones((h * n, 1));

        let (va, vt) = vector_gae(&vector, gamma, lambda).unwrap();
        let (sa, st) = vector_gae(&scalar, gamma, lambda).unwrap();
        for i in 0..h * n {
            let dot: f64 = va.row(i).sum() / d as f64;
            assert!((dot - sa[[i, 0]] / d as f64).abs() < 1e-12);
        }
        // After normalization the two agree up to the epsilon in the
        // denominator, which acts on standard deviations differing by 1/D.
        let all: Vec<usize> = (0..h * n).collect();
        let mv = Minibatch::gather(&vector, &va, &vt, &all);
        let ms = Minibatch::gather(&scalar, &sa, &st, &all);
        for (x, y) in mv.advantages.iter().zip(ms.advantages.iter()) {
            assert!((x - y).abs() < 1e-7, "{x} vs {y}");
        }
    }
}
