use ndarray::Array2;

use crate::{Result, RolloutBuffer};

/// Generalized advantage estimation run independently per objective.
///
/// `δ_t = r_t + γ v_next − v_t` and `A_t = δ_t + γλ A_{t+1}`, where the
/// recursion restarts at episode ends. `v_next` is zero after termination,
/// the stored bootstrap value after truncation, the next step's value
/// otherwise, and `last_values` past the end of the rollout.
/// Returns `(advantages, targets)` with `targets = advantages + values`.
pub fn vector_gae(buffer: &RolloutBuffer, gamma: f64, lambda: f64) -> Result<(Array2<f64>, Array2<f64>)> {
    buffer.validate()?;
    let (t_len, slots, dim) = (buffer.horizon, buffer.slots, buffer.value_dim());
    let mut adv = Array2::zeros((buffer.len(), dim));
    for s in 0..slots {
        for d in 0..dim {
            let mut next_adv = 0.0;
            for t in (0..t_len).rev() {
                let i = buffer.index(t, s);
                let (next_value, carry) = if buffer.terminated[i] {
                    (0.0, 0.0)
                } else if buffer.truncated[i] {
                    (buffer.bootstrap_values[[i, d]], 0.0)
                } else if t + 1 == t_len {
                    (buffer.last_values[[s, d]], 0.0)
                } else {
                    (buffer.values[[i + slots, d]], next_adv)
                };
                let delta = buffer.rewards[[i, d]] + gamma * next_value - buffer.values[[i, d]];
                let a = delta + gamma * lambda * carry;
                adv[[i, d]] = a;
                next_adv = a;
            }
        }
    }
    let targets = &adv + &buffer.values;
    Ok((adv, targets))
}
