//! Full-batch Adam training loops.

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::fibnet::{BlockTargets, FibNet};
use crate::nn::{AdamConfig, AdamState, DenseNetwork};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    /// Number of full-batch Adam steps.
    pub epochs: usize,
    #[serde(default)]
    pub adam: AdamConfig,
}

impl TrainConfig {
    pub fn new(epochs: usize) -> Self {
        Self {
            epochs,
            adam: AdamConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        self.adam.validate()
    }
}

/// Runs `cfg.epochs` Adam steps on the MSE loss and returns the loss of the
/// final parameters.
pub fn train_mlp(
    net: &mut DenseNetwork,
    inputs: ArrayView2<'_, f64>,
    targets: ArrayView1<'_, f64>,
    cfg: &TrainConfig,
) -> Result<f64> {
    train_mlp_snapshots(net, inputs, targets, cfg, &[])?;
    let pred = net.forward(inputs)?;
    crate::nn::mse(pred.view(), targets)
}

/// Like [`train_mlp`], but also returns copies of the network taken after
/// each step count in `at` (ascending, each in `1..=cfg.epochs`). A snapshot
/// after `k` steps equals the result of training for `k` epochs outright.
pub fn train_mlp_snapshots(
    net: &mut DenseNetwork,
    inputs: ArrayView2<'_, f64>,
    targets: ArrayView1<'_, f64>,
    cfg: &TrainConfig,
    at: &[usize],
) -> Result<Vec<DenseNetwork>> {
    cfg.validate()?;
    if at.windows(2).any(|w| w[0] >= w[1]) || at.iter().any(|&k| k == 0 || k > cfg.epochs) {
        return Err(Error::InvalidArgument(format!(
            "snapshot steps must be ascending within 1..={}, got {at:?}",
            cfg.epochs
        )));
    }
    let mut adam = AdamState::new(net, cfg.adam);
    let mut snapshots = Vec::with_capacity(at.len());
    let mut next = at.iter().peekable();
    for step in 1..=cfg.epochs {
        let (_, grads) = net.backward(inputs, targets)?;
        adam.step(net, &grads)?;
        if next.next_if(|&&k| k == step).is_some() {
            snapshots.push(net.clone());
        }
    }
    Ok(snapshots)
}

/// Losses of a trained FibNet.
#[derive(Debug, Clone, PartialEq)]
pub struct FibNetFit {
    /// Weighted total loss of the final parameters.
    pub total: f64,
    pub per_block: Vec<f64>,
}

/// Trains all blocks simultaneously on `sum_i weights[i] · L_i`.
pub fn train_fibnet(
    net: &mut FibNet,
    targets: &BlockTargets,
    weights: &[f64],
    cfg: &TrainConfig,
) -> Result<FibNetFit> {
    cfg.validate()?;
    let mut states: Vec<AdamState> = net
        .blocks()
        .iter()
        .map(|b| AdamState::new(b, cfg.adam))
        .collect();
    for _ in 0..cfg.epochs {
        let g = net.backward_weighted(targets, weights)?;
        for ((block, state), grads) in net.blocks_mut().iter_mut().zip(&mut states).zip(&g.grads) {
            state.step(block, grads)?;
        }
    }
    let outputs = net.forward(targets.xs())?;
    let (_, per_block) = crate::fibnet::fibnet_loss(&outputs, targets)?;
    let total = per_block.iter().zip(weights).map(|(l, w)| l * w).sum();
    Ok(FibNetFit { total, per_block })
}
