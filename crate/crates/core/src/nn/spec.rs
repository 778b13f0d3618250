use std::ops::Range;

use super::NnError;

pub const KERNEL: usize = 3;
pub const DEFAULT_CONV_WIDTHS: [usize; 3] = [128, 256, 128];
pub const DEFAULT_SLOPE: f64 = 0.01;

/// Shape of a Q-network: unpadded stride-1 3x3 convolutions with leaky
/// ReLU, then one fully connected layer.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    pub input_channels: usize,
    /// Side length of the square input (node count).
    pub grid: usize,
    pub conv_widths: Vec<usize>,
    pub outputs: usize,
    /// Negative-side slope of the leaky ReLU.
    pub slope: f64,
}

/// Where one layer's parameters sit in the flat parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerLayout {
    pub name: String,
    pub inputs: usize,
    pub outputs: usize,
    /// Weights, `outputs x inputs` row-major (conv inputs are `c_in * 9`).
    pub weights: Range<usize>,
    pub bias: Range<usize>,
    /// Side length of the layer's output map; 0 for the dense layer.
    pub out_grid: usize,
}

impl NetworkSpec {
    /// Meta controller: 4 input channels, one output per node.
    pub fn meta(n: usize) -> Self {
        NetworkSpec {
            input_channels: crate::state::META_CHANNELS,
            grid: n,
            conv_widths: DEFAULT_CONV_WIDTHS.to_vec(),
            outputs: n,
            slope: DEFAULT_SLOPE,
        }
    }

    /// Intrinsic controller: 5 input channels, one output per adjacency slot.
    pub fn intrinsic(n: usize, max_degree: usize) -> Self {
        NetworkSpec {
            input_channels: crate::state::INTRINSIC_CHANNELS,
            outputs: max_degree,
            ..NetworkSpec::meta(n)
        }
    }

    pub fn with_conv_widths(mut self, widths: &[usize]) -> Self {
        self.conv_widths = widths.to_vec();
        self
    }

    pub fn validate(&self) -> Result<(), NnError> {
        let bad = |msg: String| Err(NnError::InvalidSpec(msg));
        if self.input_channels == 0 || self.outputs == 0 {
            return bad("channels and outputs must be positive".into());
        }
        if self.conv_widths.is_empty() || self.conv_widths.contains(&0) {
            return bad(format!(
                "conv widths must be non-empty and positive, got {:?}",
                self.conv_widths
            ));
        }
        let shrink = (KERNEL - 1) * self.conv_widths.len();
        if self.grid <= shrink {
            return bad(format!(
                "grid {} too small for {} conv layers",
                self.grid,
                self.conv_widths.len()
            ));
        }
        if !(self.slope.is_finite() && self.slope > 0.0 && self.slope < 1.0) {
            return bad(format!(
                "leaky slope must lie in (0, 1), got {}",
                self.slope
            ));
        }
        Ok(())
    }

    /// Side length after the last convolution.
    pub fn final_grid(&self) -> usize {
        self.grid - (KERNEL - 1) * self.conv_widths.len()
    }

    /// Width of the flattened feature vector entering the dense layer.
    pub fn fc_inputs(&self) -> usize {
        self.conv_widths.last().copied().unwrap_or(0) * self.final_grid().pow(2)
    }

    pub fn layers(&self) -> Vec<LayerLayout> {
        let mut out = Vec::new();
        let mut offset = 0;
        let mut c_in = self.input_channels;
        let mut grid = self.grid;
        let mut push = |name: String, inputs: usize, outputs: usize, out_grid: usize| {
            let weights = offset..offset + inputs * outputs;
            let bias = weights.end..weights.end + outputs;
            offset = bias.end;
            out.push(LayerLayout {
                name,
                inputs,
                outputs,
                weights,
                bias,
                out_grid,
            });
        };
        for (k, &w) in self.conv_widths.iter().enumerate() {
            grid -= KERNEL - 1;
            push(format!("conv{}", k + 1), c_in * KERNEL * KERNEL, w, grid);
            c_in = w;
        }
        push("fc".into(), self.fc_inputs(), self.outputs, 0);
        out
    }

    pub fn param_count(&self) -> usize {
        self.layers().last().map_or(0, |l| l.bias.end)
    }

    /// Floats per input sample.
    pub fn input_len(&self) -> usize {
        self.input_channels * self.grid * self.grid
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_heads_for_fourteen_nodes() {
        let meta = NetworkSpec::meta(14);
        assert_eq!(meta.fc_inputs(), 8192);
        assert_eq!(meta.outputs, 14);
        assert_eq!(NetworkSpec::intrinsic(14, 7).outputs, 7);
        assert_eq!(NetworkSpec::intrinsic(14, 7).input_channels, 5);
    }

    #[test]
    fn fc_width_formula() {
        for n in 7..20 {
            assert_eq!(NetworkSpec::meta(n).fc_inputs(), 128 * (n - 6) * (n - 6));
        }
        assert!(NetworkSpec::meta(6).validate().is_err());
        assert!(NetworkSpec::meta(7).validate().is_ok());
    }

    #[test]
    fn layout_is_contiguous() {
        let spec = NetworkSpec::meta(14);
        let layers = spec.layers();
        assert_eq!(layers.len(), 4);
        assert_eq!(layers[0].weights, 0..128 * 36);
        for pair in layers.windows(2) {
            assert_eq!(pair[0].bias.end, pair[1].weights.start);
        }
        let expected = 128 * 36 + 128 + 256 * 1152 + 256 + 128 * 2304 + 128 + 14 * 8192 + 14;
        assert_eq!(spec.param_count(), expected);
    }
}
