use super::gemm::{gemm, View};
use super::{NnError, ParameterSet, KERNEL};

/// Intermediate values of one forward pass, kept for backpropagation.
#[derive(Clone, Debug)]
pub struct Forward {
    batch: usize,
    /// Per convolution: its input unrolled into patches, `(c_in*9) x (batch*p)`.
    cols: Vec<Vec<f64>>,
    /// Per convolution: activated output, channel-major `c x (batch*p)`.
    acts: Vec<Vec<f64>>,
    /// Flattened dense-layer input, `batch x fc_inputs`.
    features: Vec<f64>,
    q: Vec<f64>,
}

impl Forward {
    pub fn batch(&self) -> usize {
        self.batch
    }

    /// Q-values, `batch x outputs` row-major.
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// Sign of every hidden pre-activation, used to spot kink crossings.
    pub fn active_pattern(&self) -> Vec<bool> {
        self.acts.iter().flatten().map(|&a| a > 0.0).collect()
    }
}

/// Evaluates the network on `batch` inputs laid out sample-major, each
/// `channels x grid x grid`.
pub fn forward(params: &ParameterSet, input: &[f64], batch: usize) -> Result<Forward, NnError> {
    let spec = params.spec();
    let expected = batch * spec.input_len();
    if input.len() != expected || batch == 0 {
        return Err(NnError::Shape {
            expected,
            got: input.len(),
        });
    }
    let w = params.values();
    let layers = spec.layers();

    // Channel-major layout: [c][b][y][x].
    let mut grid = spec.grid;
    let mut channels = spec.input_channels;
    let plane = grid * grid;
    let mut x = vec![0.0; expected];
    for b in 0..batch {
        for c in 0..channels {
            let src = &input[(b * channels + c) * plane..][..plane];
            x[(c * batch + b) * plane..][..plane].copy_from_slice(src);
        }
    }

    let mut cols_all = Vec::new();
    let mut acts = Vec::new();
    for layer in &layers[..layers.len() - 1] {
        let out_grid = layer.out_grid;
        let cols = im2col(&x, channels, batch, grid, out_grid);
        let n = batch * out_grid * out_grid;
        let mut z = vec![0.0; layer.outputs * n];
        for (co, row) in z.chunks_mut(n).enumerate() {
            row.fill(w[layer.bias.start + co]);
        }
        gemm(
            View::row_major(&w[layer.weights.clone()], layer.outputs, layer.inputs),
            View::row_major(&cols, layer.inputs, n),
            1.0,
            &mut z,
        );
        for v in &mut z {
            if *v <= 0.0 {
                *v *= spec.slope;
            }
        }
        cols_all.push(cols);
        x = z.clone();
        acts.push(z);
        grid = out_grid;
        channels = layer.outputs;
    }

    let fc = layers.last().expect("dense layer");
    let p = grid * grid;
    let mut features = vec![0.0; batch * fc.inputs];
    for c in 0..channels {
        for b in 0..batch {
            features[b * fc.inputs + c * p..][..p].copy_from_slice(&x[(c * batch + b) * p..][..p]);
        }
    }
    let mut q = vec![0.0; batch * fc.outputs];
    for row in q.chunks_mut(fc.outputs) {
        row.copy_from_slice(&w[fc.bias.clone()]);
    }
    gemm(
        View::row_major(&features, batch, fc.inputs),
        View::row_major(&w[fc.weights.clone()], fc.outputs, fc.inputs).t(),
        1.0,
        &mut q,
    );
    if q.iter().any(|v| !v.is_finite()) {
        return Err(NnError::NonFinite("forward output".into()));
    }
    Ok(Forward {
        batch,
        cols: cols_all,
        acts,
        features,
        q,
    })
}

/// Q-values only.
pub fn q_values(params: &ParameterSet, input: &[f64], batch: usize) -> Result<Vec<f64>, NnError> {
    Ok(forward(params, input, batch)?.q)
}

/// Gradient of a scalar objective with respect to every parameter, given
/// the objective's gradient `d_q` with respect to the Q-value matrix.
pub fn backward(params: &ParameterSet, fwd: &Forward, d_q: &[f64]) -> Result<Vec<f64>, NnError> {
    let spec = params.spec();
    let w = params.values();
    let layers = spec.layers();
    let batch = fwd.batch;
    if d_q.len() != fwd.q.len() {
        return Err(NnError::Shape {
            expected: fwd.q.len(),
            got: d_q.len(),
        });
    }
    let mut grad = vec![0.0; w.len()];

    let fc = layers.last().expect("dense layer");
    gemm(
        View::row_major(d_q, batch, fc.outputs).t(),
        View::row_major(&fwd.features, batch, fc.inputs),
        0.0,
        &mut grad[fc.weights.clone()],
    );
    for row in d_q.chunks(fc.outputs) {
        for (g, d) in grad[fc.bias.clone()].iter_mut().zip(row) {
            *g += d;
        }
    }
    let mut d_features = vec![0.0; batch * fc.inputs];
    gemm(
        View::row_major(d_q, batch, fc.outputs),
        View::row_major(&w[fc.weights.clone()], fc.outputs, fc.inputs),
        0.0,
        &mut d_features,
    );

    let convs = &layers[..layers.len() - 1];
    let last = convs.last().expect("conv layer");
    let p = last.out_grid * last.out_grid;
    let mut d_act = vec![0.0; last.outputs * batch * p];
    for c in 0..last.outputs {
        for b in 0..batch {
            d_act[(c * batch + b) * p..][..p]
                .copy_from_slice(&d_features[b * fc.inputs + c * p..][..p]);
        }
    }

    for (k, layer) in convs.iter().enumerate().rev() {
        let n = batch * layer.out_grid * layer.out_grid;
        for (d, &a) in d_act.iter_mut().zip(&fwd.acts[k]) {
            if a <= 0.0 {
                *d *= spec.slope;
            }
        }
        let d_z = d_act;
        gemm(
            View::row_major(&d_z, layer.outputs, n),
            View::row_major(&fwd.cols[k], layer.inputs, n).t(),
            0.0,
            &mut grad[layer.weights.clone()],
        );
        for (co, row) in d_z.chunks(n).enumerate() {
            grad[layer.bias.start + co] = row.iter().sum();
        }
        if k == 0 {
            break;
        }
        let mut d_cols = vec![0.0; layer.inputs * n];
        gemm(
            View::row_major(&w[layer.weights.clone()], layer.outputs, layer.inputs).t(),
            View::row_major(&d_z, layer.outputs, n),
            0.0,
            &mut d_cols,
        );
        let in_grid = layer.out_grid + KERNEL - 1;
        d_act = col2im(
            &d_cols,
            layer.inputs / (KERNEL * KERNEL),
            batch,
            in_grid,
            layer.out_grid,
        );
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(NnError::NonFinite("gradient".into()));
    }
    Ok(grad)
}

/// Unrolls 3x3 patches: row `c*9 + ky*3 + kx`, column `b*out^2 + oy*out + ox`.
fn im2col(x: &[f64], channels: usize, batch: usize, grid: usize, out: usize) -> Vec<f64> {
    let n = batch * out * out;
    let mut cols = vec![0.0; channels * KERNEL * KERNEL * n];
    for c in 0..channels {
        for ky in 0..KERNEL {
            for kx in 0..KERNEL {
                let row = &mut cols[((c * KERNEL + ky) * KERNEL + kx) * n..][..n];
                for b in 0..batch {
                    let src = &x[(c * batch + b) * grid * grid..];
                    for oy in 0..out {
                        let from = (oy + ky) * grid + kx;
                        row[(b * out + oy) * out..][..out].copy_from_slice(&src[from..from + out]);
                    }
                }
            }
        }
    }
    cols
}

/// Adjoint of [`im2col`]: scatters patch gradients back onto the input map.
fn col2im(cols: &[f64], channels: usize, batch: usize, grid: usize, out: usize) -> Vec<f64> {
    let n = batch * out * out;
    let mut x = vec![0.0; channels * batch * grid * grid];
    for c in 0..channels {
        for ky in 0..KERNEL {
            for kx in 0..KERNEL {
                let row = &cols[((c * KERNEL + ky) * KERNEL + kx) * n..][..n];
                for b in 0..batch {
                    let dst = &mut x[(c * batch + b) * grid * grid..];
                    for oy in 0..out {
                        let from = (oy + ky) * grid + kx;
                        for (d, s) in dst[from..from + out]
                            .iter_mut()
                            .zip(&row[(b * out + oy) * out..][..out])
                        {
                            *d += s;
                        }
                    }
                }
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::NetworkSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_input(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.random_range(0.0..1.0)).collect()
    }

    /// Direct nested-loop evaluation of the same network.
    fn naive_forward(params: &ParameterSet, input: &[f64]) -> Vec<f64> {
        let spec = params.spec();
        let w = params.values();
        let mut grid = spec.grid;
        let mut x = input.to_vec();
        let mut c_in = spec.input_channels;
        let layers = spec.layers();
        for layer in &layers[..layers.len() - 1] {
            let out = grid - 2;
            let mut y = vec![0.0; layer.outputs * out * out];
            for co in 0..layer.outputs {
                for oy in 0..out {
                    for ox in 0..out {
                        let mut s = w[layer.bias.start + co];
                        for ci in 0..c_in {
                            for ky in 0..3 {
                                for kx in 0..3 {
                                    let wi = layer.weights.start
                                        + co * layer.inputs
                                        + ci * 9
                                        + ky * 3
                                        + kx;
                                    s += w[wi] * x[ci * grid * grid + (oy + ky) * grid + ox + kx];
                                }
                            }
                        }
                        y[co * out * out + oy * out + ox] =
                            if s > 0.0 { s } else { spec.slope * s };
                    }
                }
            }
            x = y;
            grid = out;
            c_in = layer.outputs;
        }
        let fc = layers.last().unwrap();
        (0..fc.outputs)
            .map(|o| {
                w[fc.bias.start + o]
                    + (0..fc.inputs)
                        .map(|f| w[fc.weights.start + o * fc.inputs + f] * x[f])
                        .sum::<f64>()
            })
            .collect()
    }

    #[test]
    fn batched_forward_matches_naive_loops() {
        let spec = NetworkSpec::intrinsic(9, 4).with_conv_widths(&[3, 5, 2]);
        let params = ParameterSet::init(&spec, 1).unwrap();
        let batch = 3;
        let input = random_input(batch * spec.input_len(), 2);
        let q = q_values(&params, &input, batch).unwrap();
        for b in 0..batch {
            let expect = naive_forward(&params, &input[b * spec.input_len()..][..spec.input_len()]);
            for (x, y) in q[b * 4..][..4].iter().zip(&expect) {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn zero_network_gives_zero_output() {
        let spec = NetworkSpec::meta(14);
        let params = ParameterSet::zeros(&spec).unwrap();
        let q = q_values(&params, &vec![0.0; spec.input_len()], 1).unwrap();
        assert_eq!(q, vec![0.0; 14]);
    }

    #[test]
    fn full_size_heads() {
        let meta = ParameterSet::init(&NetworkSpec::meta(14), 0).unwrap();
        let intr = ParameterSet::init(&NetworkSpec::intrinsic(14, 7), 0).unwrap();
        let fwd = forward(&meta, &random_input(4 * 196, 1), 1).unwrap();
        assert_eq!(fwd.q().len(), 14);
        assert_eq!(fwd.features.len(), 8192);
        assert_eq!(
            q_values(&intr, &random_input(5 * 196, 1), 1).unwrap().len(),
            7
        );
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let params =
            ParameterSet::init(&NetworkSpec::meta(8).with_conv_widths(&[2, 2, 2]), 0).unwrap();
        assert!(matches!(
            q_values(&params, &[0.0; 10], 1),
            Err(NnError::Shape { .. })
        ));
    }

    #[test]
    fn zero_upstream_gradient_gives_zero_gradient() {
        let spec = NetworkSpec::meta(8).with_conv_widths(&[2, 3, 2]);
        let params = ParameterSet::init(&spec, 5).unwrap();
        let fwd = forward(&params, &random_input(2 * spec.input_len(), 3), 2).unwrap();
        let g = backward(&params, &fwd, &vec![0.0; fwd.q().len()]).unwrap();
        assert!(g.iter().all(|&x| x == 0.0));
    }
}
