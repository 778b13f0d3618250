use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{NetworkSpec, NnError};

/// All weights and biases of one network in a single flat vector, laid out
/// as [`NetworkSpec::layers`] describes.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSet {
    spec: NetworkSpec,
    values: Vec<f64>,
}

impl ParameterSet {
    /// Uniform in `+-1/sqrt(fan_in)` per layer, weights and biases alike.
    pub fn init(spec: &NetworkSpec, seed: u64) -> Result<Self, NnError> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = vec![0.0; spec.param_count()];
        for layer in spec.layers() {
            let bound = 1.0 / (layer.inputs as f64).sqrt();
            for v in &mut values[layer.weights.start..layer.bias.end] {
                *v = rng.random_range(-bound..bound);
            }
        }
        Ok(ParameterSet {
            spec: spec.clone(),
            values,
        })
    }

    pub fn zeros(spec: &NetworkSpec) -> Result<Self, NnError> {
        spec.validate()?;
        Ok(ParameterSet {
            spec: spec.clone(),
            values: vec![0.0; spec.param_count()],
        })
    }

    pub fn from_values(spec: &NetworkSpec, values: Vec<f64>) -> Result<Self, NnError> {
        spec.validate()?;
        if values.len() != spec.param_count() {
            return Err(NnError::Shape {
                expected: spec.param_count(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(NnError::NonFinite("parameters".into()));
        }
        Ok(ParameterSet {
            spec: spec.clone(),
            values,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Target network refresh: an exact copy of the policy parameters.
pub fn sync_target(policy: &ParameterSet) -> ParameterSet {
    policy.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_seeded_and_bounded() {
        let spec = NetworkSpec::meta(8).with_conv_widths(&[4, 4, 4]);
        let a = ParameterSet::init(&spec, 3).unwrap();
        assert_eq!(a, ParameterSet::init(&spec, 3).unwrap());
        assert_ne!(a, ParameterSet::init(&spec, 4).unwrap());
        for layer in spec.layers() {
            let bound = 1.0 / (layer.inputs as f64).sqrt();
            assert!(a.values()[layer.weights.start..layer.bias.end]
                .iter()
                .all(|v| v.abs() <= bound));
        }
    }

    #[test]
    fn rejects_wrong_length_or_nan() {
        let spec = NetworkSpec::meta(8).with_conv_widths(&[2, 2, 2]);
        let n = spec.param_count();
        assert!(ParameterSet::from_values(&spec, vec![0.0; n - 1]).is_err());
        let mut v = vec![0.0; n];
        v[3] = f64::NAN;
        assert!(ParameterSet::from_values(&spec, v).is_err());
    }
}
