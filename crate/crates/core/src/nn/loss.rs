use super::{backward, forward, q_values, NnError, ParameterSet};

/// Elementwise Huber loss with unit threshold.
pub fn huber(pred: f64, target: f64) -> f64 {
    let d = (pred - target).abs();
    if d < 1.0 {
        0.5 * d * d
    } else {
        d - 0.5
    }
}

fn huber_slope(pred: f64, target: f64) -> f64 {
    (pred - target).clamp(-1.0, 1.0)
}

/// Importance-weighted mean `sum(w_i * huber_i) / len` and the per-sample terms.
pub fn huber_loss(
    pred: &[f64],
    target: &[f64],
    weights: &[f64],
) -> Result<(f64, Vec<f64>), NnError> {
    if pred.len() != target.len() || pred.len() != weights.len() || pred.is_empty() {
        return Err(NnError::Shape {
            expected: pred.len(),
            got: target.len().min(weights.len()),
        });
    }
    let per: Vec<f64> = pred
        .iter()
        .zip(target)
        .map(|(&p, &t)| huber(p, t))
        .collect();
    let total = per.iter().zip(weights).map(|(l, w)| l * w).sum::<f64>() / pred.len() as f64;
    Ok((total, per))
}

/// Bootstrapped target: `r` for terminal transitions, else
/// `r + gamma * max_a Q_target(next, a)`.
pub fn td_target(
    r: f64,
    next: Option<&[f64]>,
    target: &ParameterSet,
    gamma: f64,
) -> Result<f64, NnError> {
    Ok(td_targets(&[r], &[next], target, gamma)?[0])
}

/// Batched [`td_target`] with one forward pass over the non-terminal states.
pub fn td_targets(
    rewards: &[f64],
    next: &[Option<&[f64]>],
    target: &ParameterSet,
    gamma: f64,
) -> Result<Vec<f64>, NnError> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(NnError::InvalidSpec(format!(
            "discount {gamma} outside [0, 1]"
        )));
    }
    if rewards.len() != next.len() {
        return Err(NnError::Shape {
            expected: rewards.len(),
            got: next.len(),
        });
    }
    let live: Vec<&[f64]> = next.iter().flatten().copied().collect();
    let mut out = rewards.to_vec();
    if live.is_empty() || gamma == 0.0 {
        return Ok(out);
    }
    let q = q_values(target, &live.concat(), live.len())?;
    let width = target.spec().outputs;
    let mut rows = q.chunks(width);
    for (y, s) in out.iter_mut().zip(next) {
        if s.is_some() {
            let best = rows
                .next()
                .expect("one row per live state")
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            *y += gamma * best;
        }
    }
    Ok(out)
}

/// Result of evaluating the weighted Huber objective on chosen actions.
#[derive(Clone, Debug)]
pub struct LossEval {
    pub loss: f64,
    /// `target - Q(s, a)` per sample.
    pub td_errors: Vec<f64>,
    pub grad: Vec<f64>,
}

/// Forward, weighted Huber loss on `Q(s_i, a_i)` against `targets`, and
/// the parameter gradient.
pub fn q_loss_and_grad(
    params: &ParameterSet,
    states: &[f64],
    actions: &[usize],
    targets: &[f64],
    weights: &[f64],
) -> Result<LossEval, NnError> {
    let batch = actions.len();
    let width = params.spec().outputs;
    if let Some(&a) = actions.iter().find(|&&a| a >= width) {
        return Err(NnError::Shape {
            expected: width,
            got: a,
        });
    }
    let fwd = forward(params, states, batch)?;
    let chosen: Vec<f64> = actions
        .iter()
        .enumerate()
        .map(|(b, &a)| fwd.q()[b * width + a])
        .collect();
    let (loss, _) = huber_loss(&chosen, targets, weights)?;
    if !loss.is_finite() {
        return Err(NnError::NonFinite("loss".into()));
    }
    let mut d_q = vec![0.0; fwd.q().len()];
    for (b, &a) in actions.iter().enumerate() {
        d_q[b * width + a] = weights[b] * huber_slope(chosen[b], targets[b]) / batch as f64;
    }
    let grad = backward(params, &fwd, &d_q)?;
    let td_errors = chosen.iter().zip(targets).map(|(q, t)| t - q).collect();
    Ok(LossEval {
        loss,
        td_errors,
        grad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::NetworkSpec;

    #[test]
    fn huber_values() {
        assert!((huber(0.5, 0.0) - 0.125).abs() < 1e-15);
        assert_eq!(huber(1.0, 0.0), 0.5);
        assert_eq!(huber(0.0, 1.0), 0.5);
        assert!((huber(1.0 - 1e-12, 0.0) - 0.5).abs() < 1e-11);
        assert_eq!(huber(-2.0, 0.0), 1.5);
    }

    #[test]
    fn weighted_mean() {
        let (total, per) = huber_loss(&[0.5, 2.0], &[0.0, 0.0], &[1.0, 0.5]).unwrap();
        assert_eq!(per, vec![0.125, 1.5]);
        assert!((total - (0.125 + 0.75) / 2.0).abs() < 1e-15);
        assert!(huber_loss(&[1.0], &[1.0, 2.0], &[1.0]).is_err());
    }

    fn tiny() -> ParameterSet {
        ParameterSet::init(&NetworkSpec::meta(7).with_conv_widths(&[2, 2, 2]), 9).unwrap()
    }

    #[test]
    fn td_target_cases() {
        let target = tiny();
        let state = vec![0.3; target.spec().input_len()];
        assert_eq!(td_target(0.7, None, &target, 0.9).unwrap(), 0.7);
        assert_eq!(td_target(0.7, Some(&state), &target, 0.0).unwrap(), 0.7);
        let best = q_values(&target, &state, 1)
            .unwrap()
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let y = td_target(0.01, Some(&state), &target, 0.9).unwrap();
        assert!((y - (0.01 + 0.9 * best)).abs() < 1e-15);
        let batched = td_targets(&[0.7, 0.01], &[None, Some(&state)], &target, 0.9).unwrap();
        assert_eq!(batched, vec![0.7, y]);
    }

    #[test]
    fn td_target_with_unit_max() {
        // Zero network except the dense bias, so every Q-value is 1.
        let spec = NetworkSpec::meta(7).with_conv_widths(&[1, 1, 1]);
        let mut params = ParameterSet::zeros(&spec).unwrap();
        let fc = spec.layers().pop().unwrap();
        params.values_mut()[fc.bias].fill(1.0);
        let state = vec![0.0; spec.input_len()];
        assert!((td_target(0.01, Some(&state), &params, 0.9).unwrap() - 0.91).abs() < 1e-15);
    }

    #[test]
    fn perfect_prediction_has_zero_gradient() {
        let params = tiny();
        let states = vec![0.2; 2 * params.spec().input_len()];
        let q = q_values(&params, &states, 2).unwrap();
        let w = params.spec().outputs;
        let eval =
            q_loss_and_grad(&params, &states, &[1, 3], &[q[1], q[w + 3]], &[1.0, 1.0]).unwrap();
        assert_eq!(eval.loss, 0.0);
        assert!(eval.grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn weights_act_linearly() {
        let params = tiny();
        let one = vec![0.4; params.spec().input_len()];
        let states = [one.clone(), one].concat();
        let a = q_loss_and_grad(&params, &states, &[2, 2], &[1.5, 1.5], &[1.0, 1.0]).unwrap();
        let b = q_loss_and_grad(&params, &states, &[2, 2], &[1.5, 1.5], &[2.0, 0.0]).unwrap();
        assert!((a.loss - b.loss).abs() < 1e-15);
        for (x, y) in a.grad.iter().zip(&b.grad) {
            assert!((x - y).abs() <= 1e-15 * x.abs().max(1.0));
        }
    }
}
