use super::{NnError, ParameterSet};

/// Adaptive-moment optimizer with bias correction.
#[derive(Clone, Debug, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(param_count: usize, lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, params: &mut ParameterSet, grad: &[f64]) -> Result<(), NnError> {
        if grad.len() != params.len() || grad.len() != self.m.len() {
            return Err(NnError::Shape {
                expected: params.len(),
                got: grad.len(),
            });
        }
        if let Some(k) = grad.iter().position(|g| !g.is_finite()) {
            return Err(NnError::NonFinite(format!("gradient entry {k}")));
        }
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for (((p, &g), m), v) in params
            .values_mut()
            .iter_mut()
            .zip(grad)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= self.lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::NetworkSpec;

    #[test]
    fn first_step_moves_by_lr_against_gradient_sign() {
        let spec = NetworkSpec::meta(7).with_conv_widths(&[1, 1, 1]);
        let mut p = ParameterSet::zeros(&spec).unwrap();
        let mut opt = Adam::new(p.len(), 1e-3);
        let grad: Vec<f64> = (0..p.len())
            .map(|k| if k % 2 == 0 { 2.0 } else { -0.5 })
            .collect();
        opt.step(&mut p, &grad).unwrap();
        for (k, &x) in p.values().iter().enumerate() {
            let expect = if k % 2 == 0 { -1e-3 } else { 1e-3 };
            assert!((x - expect).abs() < 1e-9, "{k}: {x}");
        }
    }

    #[test]
    fn rejects_non_finite_gradient() {
        let spec = NetworkSpec::meta(7).with_conv_widths(&[1, 1, 1]);
        let mut p = ParameterSet::zeros(&spec).unwrap();
        let mut opt = Adam::new(p.len(), 1e-3);
        let mut grad = vec![0.0; p.len()];
        grad[5] = f64::INFINITY;
        assert!(matches!(
            opt.step(&mut p, &grad),
            Err(NnError::NonFinite(_))
        ));
        assert_eq!(opt.steps(), 0);
    }
}
