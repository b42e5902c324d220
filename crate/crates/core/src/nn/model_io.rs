use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::network::{DenseNetwork, Layer};
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Versioned JSON form of a [`DenseNetwork`].
///
/// Floats are written in shortest round-trip decimal form and parsed with
/// correct rounding, so save/load is bit-exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format_version: u32,
    pub in_dim: usize,
    pub width: usize,
    pub depth: usize,
    pub layers: Vec<LayerDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDocument {
    /// Row-major `[fan_out][fan_in]`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl From<&DenseNetwork> for ModelDocument {
    fn from(net: &DenseNetwork) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            in_dim: net.in_dim(),
            width: net.width(),
            depth: net.depth(),
            layers: net
                .layers()
                .iter()
                .map(|l| LayerDocument {
                    weights: l.weights.rows().into_iter().map(|r| r.to_vec()).collect(),
                    bias: l.bias.to_vec(),
                })
                .collect(),
        }
    }
}

impl ModelDocument {
    pub fn into_network(self) -> Result<DenseNetwork> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported model format_version {} (expected {MODEL_FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.layers.len() != self.depth + 1 {
            return Err(Error::Format(format!(
                "depth {} requires {} layers, found {}",
                self.depth,
                self.depth + 1,
                self.layers.len()
            )));
        }
        let layers = self
            .layers
            .into_iter()
            .enumerate()
            .map(|(k, doc)| {
                let rows = doc.weights.len();
                let cols = doc.weights.first().map_or(0, Vec::len);
                if doc.weights.iter().any(|r| r.len() != cols) {
                    return Err(Error::Format(format!("layer {k}: ragged weight rows")));
                }
                let flat: Vec<f64> = doc.weights.into_iter().flatten().collect();
                let weights = Array2::from_shape_vec((rows, cols), flat)
                    .map_err(|e| Error::Format(format!("layer {k}: {e}")))?;
                Ok(Layer {
                    weights,
                    bias: Array1::from(doc.bias),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let net = DenseNetwork::from_layers(layers).map_err(|e| Error::Format(e.to_string()))?;
        if net.in_dim() != self.in_dim || net.width() != self.width {
            return Err(Error::Format(format!(
                "header says in_dim={} width={}, layers say in_dim={} width={}",
                self.in_dim,
                self.width,
                net.in_dim(),
                net.width()
            )));
        }
        if net.layers()[..net.depth()].iter().any(|l| l.fan_out() != self.width) {
            return Err(Error::Format("hidden layers must all have the declared width".into()));
        }
        Ok(net)
    }
}

impl DenseNetwork {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelDocument::from(self)).expect("model document serializes")
    }

    /// Parses and validates a model document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        doc.into_network()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
