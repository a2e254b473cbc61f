use morl_core::RngStream;

use crate::{NnError, Result};

/// Numerically stable log-softmax.
pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|&x| (x - max).exp()).sum::<f64>().ln();
    logits.iter().map(|&x| x - lse).collect()
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    log_softmax(logits).into_iter().map(f64::exp).collect()
}

/// Log-probability of `action` and entropy of the categorical distribution
/// given by `logits`.
pub fn log_prob_entropy(logits: &[f64], action: usize) -> Result<(f64, f64)> {
    if action >= logits.len() {
        return Err(NnError::InvalidAction { action, count: logits.len() });
    }
    let logp = log_softmax(logits);
    let entropy = -logp.iter().map(|&l| if l == f64::NEG_INFINITY { 0.0 } else { l.exp() * l }).sum::<f64>();
    Ok((logp[action], entropy))
}

/// Inverse-CDF draw from `softmax(logits)`.
pub fn sample_categorical(logits: &[f64], rng: &mut RngStream) -> usize {
    let probs = softmax(logits);
    let u = rng.uniform();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left the cumulative sum just below one.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
