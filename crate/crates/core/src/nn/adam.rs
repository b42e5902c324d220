use serde::{Deserialize, Serialize};

use ndarray::Zip;

use super::network::{DenseNetwork, GradientSet};
use crate::{Error, Result};

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lr > 0.0
            && self.lr.is_finite()
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad Adam hyperparameters {self:?}")))
        }
    }
}

/// First and second moment accumulators for one network.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub config: AdamConfig,
    first: GradientSet,
    second: GradientSet,
    t: u64,
}

impl AdamState {
    pub fn new(net: &DenseNetwork, config: AdamConfig) -> Self {
        Self {
            config,
            first: GradientSet::zeros_like(net),
            second: GradientSet::zeros_like(net),
            t: 0,
        }
    }

    /// Number of updates applied so far.
    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Applies one bias-corrected Adam update in place. Fails if shapes differ
    /// or if the update produced a non-finite parameter.
    pub fn step(&mut self, net: &mut DenseNetwork, grads: &GradientSet) -> Result<()> {
        if !grads.matches(net) || !self.first.matches(net) {
            return Err(Error::ShapeMismatch(
                "gradient or optimizer state does not match the network".into(),
            ));
        }
        self.t += 1;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let t = self.t as i32;
        let step_size = lr / (1.0 - beta1.powi(t));
        let second_correction = 1.0 / (1.0 - beta2.powi(t));

        let update = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            *p -= step_size * *m / ((*v * second_correction).sqrt() + epsilon);
        };
        let layers = net.layers_mut().iter_mut();
        let states = grads
            .layers
            .iter()
            .zip(self.first.layers.iter_mut())
            .zip(self.second.layers.iter_mut());
        for (layer, ((g, m), v)) in layers.zip(states) {
            Zip::from(&mut layer.weights)
                .and(&g.weights)
                .and(&mut m.weights)
                .and(&mut v.weights)
                .for_each(|p, &g, m, v| update(p, g, m, v));
            Zip::from(&mut layer.bias)
                .and(&g.bias)
                .and(&mut m.bias)
                .and(&mut v.bias)
                .for_each(|p, &g, m, v| update(p, g, m, v));
        }
        net.ensure_finite()
    }
}
