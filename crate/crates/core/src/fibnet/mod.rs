//! The Fibonacci network: a chain of small dense blocks where block `i` reads
//! the raw coordinate plus the scalar outputs of blocks `i - 1` and `i - 2`.
//!
//! Each block is trained against its own target (a low-pass filtered copy of
//! the signal with cutoff `cutoff_base^i`, or the pure tone `sin(2^i x)`),
//! and the network prediction is the output of the last block. Gradients of
//! the summed loss flow through the whole chain, so early blocks also learn
//! from every later block that consumes their output.

mod io;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::nn::{mse, mse_grad, DenseNetwork, ForwardTrace, GradientSet};
use crate::signals::{lowpass, SampledSignal};
use crate::{Error, Result};

pub use io::{FibNetDocument, FIBNET_FORMAT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDims {
    pub width: usize,
    pub depth: usize,
}

impl BlockDims {
    pub const fn new(width: usize, depth: usize) -> Self {
        Self { width, depth }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetMode {
    /// Block `i` fits the signal low-passed at `cutoff_base^i` cycles.
    Lowpass,
    /// Block `i` fits `sin(2^i x)`.
    Spoonfed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibNetConfig {
    pub block_dims: Vec<BlockDims>,
    pub target_mode: TargetMode,
    #[serde(default = "default_cutoff_base")]
    pub cutoff_base: f64,
}

fn default_cutoff_base() -> f64 {
    2.0
}

impl Default for FibNetConfig {
    fn default() -> Self {
        let widths = [256, 128, 64, 32, 16, 16, 8, 8, 8, 8];
        let depths = [4, 3, 3, 2, 2, 2, 2, 2, 2, 2];
        Self {
            block_dims: widths
                .iter()
                .zip(depths)
                .map(|(&w, d)| BlockDims::new(w, d))
                .collect(),
            target_mode: TargetMode::Lowpass,
            cutoff_base: default_cutoff_base(),
        }
    }
}

impl FibNetConfig {
    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_dims.is_empty() {
            return Err(Error::InvalidConfig("a FibNet needs at least one block".into()));
        }
        if let Some(i) = self.block_dims.iter().position(|d| d.width == 0 || d.depth == 0) {
            return Err(Error::InvalidConfig(format!("block {i} has zero width or depth")));
        }
        if let Some(i) = self.block_dims.windows(2).position(|w| w[1].width > w[0].width) {
            return Err(Error::InvalidConfig(format!(
                "block {} is wider than block {i}; widths must be non-increasing",
                i + 1
            )));
        }
        if !(self.cutoff_base > 1.0 && self.cutoff_base.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "cutoff_base must be > 1, got {}",
                self.cutoff_base
            )));
        }
        Ok(())
    }

    /// Low-pass cutoff of block `i`, in cycles per grid period.
    pub fn cutoff(&self, block: usize) -> f64 {
        self.cutoff_base.powi(block as i32)
    }
}

/// Fan-in of block `i`: the coordinate plus up to two predecessor outputs.
pub fn block_fan_in(block: usize) -> usize {
    1 + block.min(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FibNet {
    config: FibNetConfig,
    blocks: Vec<DenseNetwork>,
}

/// One target signal per block, all on the same coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTargets {
    targets: Vec<SampledSignal>,
}

impl BlockTargets {
    pub fn new(targets: Vec<SampledSignal>) -> Result<Self> {
        let Some(first) = targets.first() else {
            return Err(Error::InvalidArgument("no block targets".into()));
        };
        if targets.iter().any(|t| t.xs() != first.xs()) {
            return Err(Error::InvalidArgument("block targets must share coordinates".into()));
        }
        Ok(Self { targets })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        self.targets[0].xs()
    }

    pub fn get(&self, block: usize) -> &SampledSignal {
        &self.targets[block]
    }

    pub fn iter(&self) -> impl Iterator<Item = &SampledSignal> {
        self.targets.iter()
    }
}

/// Builds the per-block targets for `signal` according to `config.target_mode`.
pub fn build_block_targets(signal: &SampledSignal, config: &FibNetConfig) -> Result<BlockTargets> {
    config.validate()?;
    let targets = (0..config.num_blocks())
        .map(|i| match config.target_mode {
            TargetMode::Lowpass => lowpass(signal, config.cutoff(i)),
            TargetMode::Spoonfed => {
                let freq = 2f64.powi(i as i32);
                signal.with_ys(signal.xs().iter().map(|&x| (freq * x).sin()).collect())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    BlockTargets::new(targets)
}

/// Per-block MSE against the targets and their unweighted sum.
pub fn fibnet_loss(outputs: &[Array1<f64>], targets: &BlockTargets) -> Result<(f64, Vec<f64>)> {
    if outputs.len() != targets.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} block outputs for {} targets",
            outputs.len(),
            targets.len()
        )));
    }
    let per_block = outputs
        .iter()
        .zip(targets.iter())
        .map(|(out, t)| mse(out.view(), ndarray::ArrayView1::from(t.ys())))
        .collect::<Result<Vec<_>>>()?;
    Ok((per_block.iter().sum(), per_block))
}

/// Result of a FibNet backward pass.
#[derive(Debug, Clone)]
pub struct FibNetGradients {
    /// Weighted total loss, `sum_i w_i L_i`.
    pub total: f64,
    /// Unweighted `L_i` for every block.
    pub per_block: Vec<f64>,
    pub grads: Vec<GradientSet>,
}

impl FibNet {
    /// Initializes every block with `DenseNetwork::init`, block `i` seeded with
    /// `seed + i`.
    pub fn init(config: FibNetConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let blocks = config
            .block_dims
            .iter()
            .enumerate()
            .map(|(i, d)| DenseNetwork::init(block_fan_in(i), d.width, d.depth, seed.wrapping_add(i as u64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { config, blocks })
    }

    /// Assembles a FibNet from existing blocks, checking the fan-in pattern
    /// and that block architectures agree with the config.
    pub fn from_blocks(config: FibNetConfig, blocks: Vec<DenseNetwork>) -> Result<Self> {
        config.validate()?;
        if blocks.len() != config.num_blocks() {
            return Err(Error::InvalidConfig(format!(
                "config lists {} blocks, got {}",
                config.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (block, dims)) in blocks.iter().zip(&config.block_dims).enumerate() {
            if block.in_dim() != block_fan_in(i)
                || block.width() != dims.width
                || block.depth() != dims.depth
                || block.layers()[..block.depth()].iter().any(|l| l.fan_out() != dims.width)
            {
                return Err(Error::InvalidConfig(format!(
                    "block {i} does not match fan-in {} and dims {dims:?}",
                    block_fan_in(i)
                )));
            }
        }
        Ok(Self { config, blocks })
    }

    pub fn config(&self) -> &FibNetConfig {
        &self.config
    }

    pub fn blocks(&self) -> &[DenseNetwork] {
        &self.blocks
    }

    pub(crate) fn blocks_mut(&mut self) -> &mut [DenseNetwork] {
        &mut self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn block_input(xs: &[f64], outputs: &[Array1<f64>], block: usize) -> Array2<f64> {
        let mut input = Array2::zeros((xs.len(), block_fan_in(block)));
        input.column_mut(0).assign(&ndarray::ArrayView1::from(xs));
        for back in 1..=block.min(2) {
            input.column_mut(back).assign(&outputs[block - back]);
        }
        input
    }

    fn forward_traces(&self, xs: &[f64]) -> Result<Vec<ForwardTrace>> {
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("coordinates".into()));
        }
        let mut outputs: Vec<Array1<f64>> = Vec::with_capacity(self.blocks.len());
        let mut traces = Vec::with_capacity(self.blocks.len());
        for (i, block) in self.blocks.iter().enumerate() {
            let input = Self::block_input(xs, &outputs, i);
            let trace = block.forward_trace(input.view())?;
            outputs.push(trace.output().to_owned());
            traces.push(trace);
        }
        Ok(traces)
    }

    /// Output batch of every block; the last one is the network prediction.
    pub fn forward(&self, xs: &[f64]) -> Result<Vec<Array1<f64>>> {
        Ok(self
            .forward_traces(xs)?
            .iter()
            .map(|t| t.output().to_owned())
            .collect())
    }

    pub fn predict(&self, xs: &[f64]) -> Result<Array1<f64>> {
        Ok(self.forward(xs)?.pop().expect("at least one block"))
    }

    /// Exact gradients of the (unweighted) total loss for every block.
    pub fn backward(&self, targets: &BlockTargets) -> Result<FibNetGradients> {
        self.backward_weighted(targets, &vec![1.0; self.blocks.len()])
    }

    /// Exact gradients of `sum_i weights[i] · L_i`, including the paths
    /// through every later block that consumes a block's output.
    pub fn backward_weighted(&self, targets: &BlockTargets, weights: &[f64]) -> Result<FibNetGradients> {
        let b = self.blocks.len();
        if targets.len() != b || weights.len() != b {
            return Err(Error::ShapeMismatch(format!(
                "{b} blocks, {} targets, {} loss weights",
                targets.len(),
                weights.len()
            )));
        }
        let traces = self.forward_traces(targets.xs())?;
        let mut d_out = Vec::with_capacity(b);
        let mut per_block = Vec::with_capacity(b);
        let mut total = 0.0;
        for ((trace, target), &w) in traces.iter().zip(targets.iter()).zip(weights) {
            let t = ndarray::ArrayView1::from(target.ys());
            let loss = mse(trace.output(), t)?;
            per_block.push(loss);
            total += w * loss;
            d_out.push(mse_grad(trace.output(), t) * w);
        }

        let mut grads = Vec::with_capacity(b);
        for i in (0..b).rev() {
            let (g, d_input) = self.blocks[i].backprop(&traces[i], d_out[i].view())?;
            for back in 1..=i.min(2) {
                let contribution = d_input.index_axis(Axis(1), back).to_owned();
                d_out[i - back] += &contribution;
            }
            grads.push(g);
        }
        grads.reverse();
        Ok(FibNetGradients {
            total,
            per_block,
            grads,
        })
    }

    pub fn flat_params(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| b.flat_params()).collect()
    }

    pub fn set_flat_params(&mut self, params: &[f64]) -> Result<()> {
        let total: usize = self.blocks.iter().map(|b| b.num_params()).sum();
        if params.len() != total {
            return Err(Error::ShapeMismatch(format!(
                "{} flat parameters for a FibNet with {total}",
                params.len()
            )));
        }
        let mut offset = 0;
        for block in &mut self.blocks {
            let n = block.num_params();
            block.set_flat_params(&params[offset..offset + n])?;
            offset += n;
        }
        Ok(())
    }
}
