use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{Error, Result};

/// One affine layer: `weights` is `[fan_out × fan_in]`, `bias` is `[fan_out]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Layer {
    pub fn fan_in(&self) -> usize {
        self.weights.ncols()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.nrows()
    }

    fn zeros(fan_out: usize, fan_in: usize) -> Self {
        Self {
            weights: Array2::zeros((fan_out, fan_in)),
            bias: Array1::zeros(fan_out),
        }
    }
}

/// Fully-connected network with ReLU hidden layers and a linear scalar head.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNetwork {
    layers: Vec<Layer>,
}

/// Gradients of a scalar loss with respect to every parameter of a
/// [`DenseNetwork`], laid out exactly like the network's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub layers: Vec<Layer>,
}

/// Post-activation values of every layer from a forward pass, kept for
/// backpropagation. `values[0]` is the input batch, `values[k + 1]` the output
/// of layer `k`.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    values: Vec<Array2<f64>>,
}

impl ForwardTrace {
    /// The `[batch]` output of the scalar head.
    pub fn output(&self) -> ArrayView1<'_, f64> {
        self.values
            .last()
            .expect("trace always holds the input")
            .column(0)
    }
}

impl DenseNetwork {
    /// Builds a network with `depth` hidden ReLU layers of `width` units and a
    /// one-unit linear head. Weights are `N(0, 2 / fan_in)`, biases are zero.
    pub fn init(in_dim: usize, width: usize, depth: usize, seed: u64) -> Result<Self> {
        if in_dim == 0 || width == 0 || depth == 0 {
            return Err(Error::InvalidDimension(format!(
                "in_dim={in_dim}, width={width}, depth={depth}; all must be >= 1"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dims = Vec::with_capacity(depth + 2);
        dims.push(in_dim);
        dims.extend(std::iter::repeat_n(width, depth));
        dims.push(1);

        let layers = dims
            .windows(2)
            .map(|pair| {
                let (fan_in, fan_out) = (pair[0], pair[1]);
                let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt())
                    .expect("fan-in scale is positive and finite");
                let mut layer = Layer::zeros(fan_out, fan_in);
                layer
                    .weights
                    .iter_mut()
                    .for_each(|w| *w = normal.sample(&mut rng));
                layer
            })
            .collect();
        Ok(Self { layers })
    }

    /// Network of the given architecture with every parameter set to zero.
    pub fn zeros(in_dim: usize, width: usize, depth: usize) -> Result<Self> {
        let mut net = Self::init(in_dim, width, depth, 0)?;
        for layer in &mut net.layers {
            layer.weights.fill(0.0);
        }
        Ok(net)
    }

    /// Assembles a network from explicit layers, checking that dimensions
    /// chain, that the head is scalar and that every value is finite.
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        let Some(last) = layers.last() else {
            return Err(Error::InvalidDimension("network needs at least one layer".into()));
        };
        if last.fan_out() != 1 {
            return Err(Error::InvalidDimension(format!(
                "output head must have one unit, found {}",
                last.fan_out()
            )));
        }
        for (k, layer) in layers.iter().enumerate() {
            if layer.fan_in() == 0 || layer.fan_out() == 0 {
                return Err(Error::InvalidDimension(format!("layer {k} has a zero dimension")));
            }
            if layer.bias.len() != layer.fan_out() {
                return Err(Error::ShapeMismatch(format!(
                    "layer {k}: bias length {} != fan_out {}",
                    layer.bias.len(),
                    layer.fan_out()
                )));
            }
            if k > 0 && layers[k - 1].fan_out() != layer.fan_in() {
                return Err(Error::ShapeMismatch(format!(
                    "layer {k}: fan_in {} != previous fan_out {}",
                    layer.fan_in(),
                    layers[k - 1].fan_out()
                )));
            }
        }
        let net = Self { layers };
        net.ensure_finite()?;
        Ok(net)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].fan_in()
    }

    /// Number of hidden layers.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// Width of the first hidden layer (0 for a purely linear network).
    pub fn width(&self) -> usize {
        if self.layers.len() > 1 {
            self.layers[0].fan_out()
        } else {
            0
        }
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    pub fn ensure_finite(&self) -> Result<()> {
        for (k, layer) in self.layers.iter().enumerate() {
            if !(layer.weights.iter().all(|v| v.is_finite()) && layer.bias.iter().all(|v| v.is_finite())) {
                return Err(Error::NonFinite(format!("parameters of layer {k}")));
            }
        }
        Ok(())
    }

    fn check_inputs(&self, inputs: &ArrayView2<'_, f64>) -> Result<()> {
        if inputs.ncols() != self.in_dim() {
            return Err(Error::ShapeMismatch(format!(
                "input width {} != network fan_in {}",
                inputs.ncols(),
                self.in_dim()
            )));
        }
        if inputs.nrows() == 0 {
            return Err(Error::EmptyBatch);
        }
        if !inputs.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("network inputs".into()));
        }
        Ok(())
    }

    /// Forward pass keeping every intermediate activation.
    pub fn forward_trace(&self, inputs: ArrayView2<'_, f64>) -> Result<ForwardTrace> {
        self.check_inputs(&inputs)?;
        let mut values = Vec::with_capacity(self.layers.len() + 1);
        values.push(inputs.to_owned());
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let mut z = values[k].dot(&layer.weights.t());
            if k < last {
                ndarray::Zip::from(&mut z)
                    .and_broadcast(&layer.bias)
                    .for_each(|v, &b| *v = (*v + b).max(0.0));
            } else {
                z += &layer.bias;
            }
            values.push(z);
        }
        Ok(ForwardTrace { values })
    }

    /// Evaluates the network on a `[batch × fan_in]` input matrix.
    pub fn forward(&self, inputs: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        let trace = self.forward_trace(inputs)?;
        Ok(trace.output().to_owned())
    }

    /// Post-ReLU activations of the last hidden layer, `[batch × width]`.
    pub fn hidden_activations(&self, inputs: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut trace = self.forward_trace(inputs)?;
        let idx = trace.values.len() - 2;
        Ok(trace.values.swap_remove(idx))
    }

    /// Backpropagates `d_output` (the loss gradient with respect to each scalar
    /// output) through a recorded forward pass. Returns parameter gradients
    /// and the gradient with respect to the inputs.
    pub fn backprop(
        &self,
        trace: &ForwardTrace,
        d_output: ArrayView1<'_, f64>,
    ) -> Result<(GradientSet, Array2<f64>)> {
        let batch = trace.values[0].nrows();
        if d_output.len() != batch {
            return Err(Error::ShapeMismatch(format!(
                "output gradient length {} != batch {batch}",
                d_output.len()
            )));
        }
        let mut grads: Vec<Layer> = Vec::with_capacity(self.layers.len());
        let mut delta = d_output.insert_axis(Axis(1)).to_owned();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let input = &trace.values[k];
            let d_weights = delta.t().dot(input);
            let d_bias = delta.sum_axis(Axis(0));
            grads.push(Layer {
                weights: d_weights,
                bias: d_bias,
            });
            let mut d_input = delta.dot(&layer.weights);
            if k > 0 {
                // ReLU gate; the subgradient at exactly 0 is 0.
                ndarray::Zip::from(&mut d_input)
                    .and(input)
                    .for_each(|d, &a| {
                        if a <= 0.0 {
                            *d = 0.0;
                        }
                    });
            }
            delta = d_input;
        }
        grads.reverse();
        Ok((GradientSet { layers: grads }, delta))
    }

    /// MSE loss over the batch and its exact gradient for every parameter.
    pub fn backward(
        &self,
        inputs: ArrayView2<'_, f64>,
        targets: ArrayView1<'_, f64>,
    ) -> Result<(f64, GradientSet)> {
        if targets.len() != inputs.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "{} targets for {} inputs",
                targets.len(),
                inputs.nrows()
            )));
        }
        if !targets.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("targets".into()));
        }
        let trace = self.forward_trace(inputs)?;
        let pred = trace.output();
        let loss = mse(pred, targets)?;
        let d_output = mse_grad(pred, targets);
        let (grads, _) = self.backprop(&trace, d_output.view())?;
        Ok((loss, grads))
    }

    /// All parameters flattened layer by layer (weights row-major, then bias).
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for layer in &self.layers {
            out.extend(layer.weights.iter());
            out.extend(layer.bias.iter());
        }
        out
    }

    /// Inverse of [`Self::flat_params`].
    pub fn set_flat_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params() {
            return Err(Error::ShapeMismatch(format!(
                "{} flat parameters for a network with {}",
                params.len(),
                self.num_params()
            )));
        }
        let mut it = params.iter();
        for layer in &mut self.layers {
            for (dst, src) in layer.weights.iter_mut().chain(layer.bias.iter_mut()).zip(&mut it) {
                *dst = *src;
            }
        }
        Ok(())
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }
}

impl GradientSet {
    pub fn zeros_like(net: &DenseNetwork) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| Layer::zeros(l.fan_out(), l.fan_in()))
                .collect(),
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.bias.iter()).all(|&v| v == 0.0))
    }

    pub(crate) fn matches(&self, net: &DenseNetwork) -> bool {
        self.layers.len() == net.layers.len()
            && self
                .layers
                .iter()
                .zip(&net.layers)
                .all(|(g, l)| g.weights.dim() == l.weights.dim() && g.bias.len() == l.bias.len())
    }

    /// `self += other`, shapes must agree.
    pub fn accumulate(&mut self, other: &GradientSet) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weights += &b.weights;
            a.bias += &b.bias;
        }
    }
}

/// Mean squared error between two equally long batches.
pub fn mse(pred: ArrayView1<'_, f64>, target: ArrayView1<'_, f64>) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} predictions vs {} targets",
            pred.len(),
            target.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let sum: f64 = pred
        .iter()
        .zip(target.iter())
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / pred.len() as f64)
}

/// Gradient of [`mse`] with respect to the predictions.
pub(crate) fn mse_grad(pred: ArrayView1<'_, f64>, target: ArrayView1<'_, f64>) -> Array1<f64> {
    let scale = 2.0 / pred.len() as f64;
    ndarray::Zip::from(pred)
        .and(target)
        .map_collect(|p, t| scale * (p - t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn init_shapes_for_width8_depth2() {
        let net = DenseNetwork::init(3, 8, 2, 0).unwrap();
        let shapes: Vec<_> = net.layers().iter().map(|l| l.weights.dim()).collect();
        assert_eq!(shapes, vec![(8, 3), (8, 8), (1, 8)]);
        assert_eq!(net.depth(), 2);
        assert_eq!(net.width(), 8);
    }

    #[test]
    fn smallest_network() {
        let net = DenseNetwork::init(1, 1, 1, 0).unwrap();
        let shapes: Vec<_> = net.layers().iter().map(|l| l.weights.dim()).collect();
        assert_eq!(shapes, vec![(1, 1), (1, 1)]);
        assert!(net.layers().iter().all(|l| l.bias.iter().all(|&b| b == 0.0)));
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let a = DenseNetwork::init(2, 16, 3, 42).unwrap();
        let b = DenseNetwork::init(2, 16, 3, 42).unwrap();
        let c = DenseNetwork::init(2, 16, 3, 43).unwrap();
        assert_eq!(a.flat_params(), b.flat_params());
        assert_ne!(a.flat_params(), c.flat_params());
    }

    #[test]
    fn init_rejects_zero_dims() {
        assert!(DenseNetwork::init(0, 8, 2, 0).is_err());
        assert!(DenseNetwork::init(1, 0, 2, 0).is_err());
        assert!(DenseNetwork::init(1, 8, 0, 0).is_err());
    }

    #[test]
    fn zero_network_outputs_zero() {
        let net = DenseNetwork::zeros(3, 8, 2).unwrap();
        let x = array![[1.0, -2.0, 3.0], [0.5, 0.5, 0.5]];
        assert_eq!(net.forward(x.view()).unwrap(), array![0.0, 0.0]);
        let acts = net.hidden_activations(x.view()).unwrap();
        assert_eq!(acts, Array2::<f64>::zeros((2, 8)));
    }

    #[test]
    fn linear_head_is_affine() {
        let net = DenseNetwork::from_layers(vec![Layer {
            weights: array![[2.0]],
            bias: array![3.0],
        }])
        .unwrap();
        assert_eq!(net.forward(array![[5.0]].view()).unwrap()[0], 13.0);
    }

    #[test]
    fn forward_rejects_dimension_mismatch() {
        let net = DenseNetwork::init(2, 4, 1, 0).unwrap();
        let err = net.forward(array![[1.0, 2.0, 3.0]].view()).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch(_)));
    }

    #[test]
    fn mse_basics() {
        assert_eq!(mse(array![0.0, 0.0].view(), array![0.0, 0.0].view()).unwrap(), 0.0);
        assert_eq!(mse(array![1.0, 0.0].view(), array![0.0, 0.0].view()).unwrap(), 0.5);
        let empty = Array1::<f64>::zeros(0);
        assert!(matches!(mse(empty.view(), empty.view()), Err(Error::EmptyBatch)));
        assert!(mse(array![1.0].view(), array![1.0, 2.0].view()).is_err());
    }

    #[test]
    fn hand_computed_linear_gradient() {
        let net = DenseNetwork::from_layers(vec![Layer {
            weights: array![[1.0]],
            bias: array![0.0],
        }])
        .unwrap();
        let (loss, grads) = net.backward(array![[1.0]].view(), array![0.0].view()).unwrap();
        assert_eq!(loss, 1.0);
        assert_eq!(grads.layers[0].weights[[0, 0]], 2.0);
        assert_eq!(grads.layers[0].bias[0], 2.0);
    }

    #[test]
    fn zero_network_with_zero_targets_has_zero_gradient() {
        let net = DenseNetwork::zeros(2, 5, 2).unwrap();
        let x = array![[0.3, -1.0], [2.0, 4.0], [0.0, 0.1]];
        let (loss, grads) = net.backward(x.view(), array![0.0, 0.0, 0.0].view()).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grads.is_zero());
    }

    #[test]
    fn backward_rejects_nan_inputs() {
        let net = DenseNetwork::init(1, 2, 1, 0).unwrap();
        let err = net
            .backward(array![[f64::NAN]].view(), array![0.0].view())
            .unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }

    #[test]
    fn from_layers_validates_chain() {
        let bad = vec![
            Layer { weights: Array2::zeros((4, 2)), bias: Array1::zeros(4) },
            Layer { weights: Array2::zeros((1, 3)), bias: Array1::zeros(1) },
        ];
        assert!(matches!(DenseNetwork::from_layers(bad), Err(Error::ShapeMismatch(_))));
        let nonfinite = vec![Layer { weights: array![[f64::INFINITY]], bias: array![0.0] }];
        assert!(matches!(DenseNetwork::from_layers(nonfinite), Err(Error::NonFinite(_))));
    }

    #[test]
    fn flat_params_round_trip() {
        let net = DenseNetwork::init(3, 4, 2, 7).unwrap();
        let mut other = DenseNetwork::zeros(3, 4, 2).unwrap();
        other.set_flat_params(&net.flat_params()).unwrap();
        assert_eq!(net, other);
        assert!(other.set_flat_params(&[1.0]).is_err());
    }
}
