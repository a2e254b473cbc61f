use morl_core::RngStream;
use morl_nn::{forward, log_prob_entropy, softmax, Activation, Graph, NetworkConfig, NetworkParams, Var};
use ndarray::Array2;
use proptest::prelude::*;

/// `|a - n| / max(|a|, |n|)`, with an absolute floor for coordinates whose
/// gradient is essentially zero.
fn relative_error(a: f64, n: f64) -> f64 {
    let scale = a.abs().max(n.abs());
    if scale < 1e-8 {
        (a - n).abs() / 1e-8
    } else {
        (a - n).abs() / scale
    }
}

fn random_matrix(rng: &mut RngStream, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| 2.0 * rng.uniform() - 1.0)
}

/// Mixed loss touching both heads: picked log-probs, entropy and a squared
/// value error.
fn loss(graph: &mut Graph<'_>, obs: &Array2<f64>, w: Option<&Array2<f64>>, actions: &[usize], targets: &Array2<f64>) -> Var {
    let (logits, values) = graph.forward(obs.view(), w.map(|w| w.view())).unwrap();
    let t = graph.tape();
    let logp = t.log_softmax(logits);
    let picked = t.pick(logp, actions).unwrap();
    let policy = t.mean(picked);
    let p = t.exp(logp);
    let plogp = t.mul(p, logp).unwrap();
    let ent = t.row_sum(plogp);
    let ent = t.mean(ent);
    let target = t.leaf(targets.clone());
    let err = t.sub(values, target).unwrap();
    let sq = t.square(err);
    let value = t.mean(sq);
    let a = t.add(policy, ent).unwrap();
    let v = t.scale(value, 0.5);
    t.add(a, v).unwrap()
}

#[test]
fn gradients_match_central_differences() {
    let h = 1e-4;
    let mut worst = 0.0f64;
    for case in 0..20u64 {
        let mut rng = RngStream::new(case, 0);
        let cond = case % 2 == 0;
        let activation = Activation::Tanh;
        let config = NetworkConfig::new(6, 3, 3, cond).with_hidden(vec![8, 8]).with_activation(activation);
        let mut params = NetworkParams::init(&config, &mut rng).unwrap();
        // Perturb the heads away from their tiny initial gains.
        for x in params.as_mut_slice() {
            *x += 0.3 * (rng.uniform() - 0.5);
        }
        let batch = 4;
        let obs = random_matrix(&mut rng, batch, 6);
        let w = cond.then(|| Array2::from_shape_fn((batch, 3), |(i, d)| if d == i % 3 { 0.6 } else { 0.2 }));
        let actions: Vec<usize> = (0..batch).map(|_| rng.below(3)).collect();
        let targets = random_matrix(&mut rng, batch, 3);

        let mut graph = Graph::new(&config, &params).unwrap();
        let l = loss(&mut graph, &obs, w.as_ref(), &actions, &targets);
        let analytic = graph.backward(l).unwrap();

        let eval = |p: &NetworkParams| {
            let mut g = Graph::new(&config, p).unwrap();
            let l = loss(&mut g, &obs, w.as_ref(), &actions, &targets);
            g.tape().scalar(l)
        };
        for (i, &a) in analytic.iter().enumerate() {
            let mut plus = params.clone();
            plus.as_mut_slice()[i] += h;
            let mut minus = params.clone();
            minus.as_mut_slice()[i] -= h;
            let numeric = (eval(&plus) - eval(&minus)) / (2.0 * h);
            let err = relative_error(a, numeric);
            worst = worst.max(err);
            assert!(err < 1e-4, "case {case} param {i}: analytic {a} numeric {numeric}");
        }
    }
    assert!(worst < 1e-4);
}

#[test]
fn unconditioned_network_ignores_weights_structurally() {
    let config = NetworkConfig::new(3, 4, 2, false).with_hidden(vec![5]);
    let params = NetworkParams::init(&config, &mut RngStream::new(0, 0)).unwrap();
    let a = forward(&params, &config, &[0.1, 0.2, 0.3], None).unwrap();
    let b = forward(&params, &config, &[0.1, 0.2, 0.3], None).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #[test]
    fn softmax_is_a_distribution(logits in prop::collection::vec(-50.0f64..50.0, 1..10), shift in -100.0f64..100.0) {
        let p = softmax(&logits);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for a in 0..logits.len() {
            let (lp, h) = log_prob_entropy(&logits, a).unwrap();
            prop_assert!(lp <= 0.0);
            let shifted: Vec<f64> = logits.iter().map(|x| x + shift).collect();
            let (_, h2) = log_prob_entropy(&shifted, a).unwrap();
            prop_assert!((h - h2).abs() < 1e-9);
        }
    }
}
