use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{forward, huber_loss, q_loss_and_grad, NetworkSpec, NnError, ParameterSet};

#[derive(Clone, Debug, PartialEq)]
pub struct GradcheckConfig {
    pub probes_per_layer: usize,
    /// Central-difference step.
    pub eps: f64,
    /// Largest accepted relative error.
    pub tolerance: f64,
    /// Relative errors are taken against `max(|analytic|, |numeric|, floor)`
    /// so gradients near zero are compared absolutely.
    pub floor: f64,
    pub batch: usize,
    pub seed: u64,
}

impl Default for GradcheckConfig {
    fn default() -> Self {
        GradcheckConfig {
            probes_per_layer: 100,
            eps: 1e-5,
            tolerance: 1e-4,
            floor: 1e-6,
            batch: 2,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerCheck {
    pub name: String,
    pub probes: usize,
    pub max_rel_error: f64,
    /// Probes whose perturbation crossed a leaky-ReLU or Huber kink; they
    /// were replaced by fresh probes.
    pub resampled: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradcheckReport {
    pub tolerance: f64,
    pub layers: Vec<LayerCheck>,
}

impl GradcheckReport {
    pub fn passed(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.max_rel_error <= self.tolerance && l.probes > 0)
    }
}

/// Compares backpropagated gradients of the weighted Huber objective with
/// central finite differences on randomly chosen parameters of every layer.
pub fn gradcheck(spec: &NetworkSpec, cfg: &GradcheckConfig) -> Result<GradcheckReport, NnError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = ParameterSet::init(spec, rng.random())?;
    let batch = cfg.batch;
    let states: Vec<f64> = (0..batch * spec.input_len())
        .map(|_| rng.random_range(0.0..1.0))
        .collect();
    let actions: Vec<usize> = (0..batch)
        .map(|_| rng.random_range(0..spec.outputs))
        .collect();
    let weights: Vec<f64> = (0..batch).map(|_| rng.random_range(0.5..1.5)).collect();
    let base = forward(&params, &states, batch)?;
    let chosen = |q: &[f64]| -> Vec<f64> {
        actions
            .iter()
            .enumerate()
            .map(|(b, &a)| q[b * spec.outputs + a])
            .collect()
    };
    // Targets off by up to 2 so both Huber branches are exercised.
    let targets: Vec<f64> = chosen(base.q())
        .iter()
        .map(|q| q + rng.random_range(-2.0..2.0))
        .collect();
    let branch = |q: &[f64]| -> Vec<bool> {
        chosen(q)
            .iter()
            .zip(&targets)
            .map(|(p, t)| (p - t).abs() < 1.0)
            .collect()
    };
    let base_pattern = (base.active_pattern(), branch(base.q()));

    let analytic = q_loss_and_grad(&params, &states, &actions, &targets, &weights)?.grad;
    let eval = |params: &ParameterSet| -> Result<(f64, (Vec<bool>, Vec<bool>)), NnError> {
        let fwd = forward(params, &states, batch)?;
        let (loss, _) = huber_loss(&chosen(fwd.q()), &targets, &weights)?;
        Ok((loss, (fwd.active_pattern(), branch(fwd.q()))))
    };

    let mut layers = Vec::new();
    for layer in spec.layers() {
        let range = layer.weights.start..layer.bias.end;
        let order = sample(&mut rng, range.len(), range.len());
        let mut check = LayerCheck {
            name: layer.name.clone(),
            probes: 0,
            max_rel_error: 0.0,
            resampled: 0,
        };
        for offset in order.iter() {
            if check.probes == cfg.probes_per_layer {
                break;
            }
            let k = range.start + offset;
            let orig = params.values()[k];
            params.values_mut()[k] = orig + cfg.eps;
            let (plus, pat_plus) = eval(&params)?;
            params.values_mut()[k] = orig - cfg.eps;
            let (minus, pat_minus) = eval(&params)?;
            params.values_mut()[k] = orig;
            if pat_plus != base_pattern || pat_minus != base_pattern {
                check.resampled += 1;
                continue;
            }
            let numeric = (plus - minus) / (2.0 * cfg.eps);
            let a = analytic[k];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(cfg.floor);
            check.max_rel_error = check.max_rel_error.max(rel);
            check.probes += 1;
        }
        layers.push(check);
    }
    Ok(GradcheckReport {
        tolerance: cfg.tolerance,
        layers,
    })
}
