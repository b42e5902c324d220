//! Input feature maps for coordinate networks.
//!
//! Every encoder keeps the raw coordinate as channel 0; the remaining channels
//! are sinusoids and therefore bounded by 1 in magnitude.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Serializable description of an encoder, as it appears in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EncoderSpec {
    Identity,
    /// `sin(2^j x), cos(2^j x)` for `j = 0..octaves`.
    Sinusoidal { octaves: usize },
    /// `sin(a_i x), cos(a_i x)` with `a_i ~ N(0, sigma)` frozen at construction.
    Gaussian {
        #[serde(default = "default_gaussian_features")]
        num_features: usize,
        #[serde(default = "default_gaussian_sigma")]
        sigma: f64,
        #[serde(default)]
        seed: u64,
    },
    /// `sin(f x)` for each listed angular frequency.
    AuxFrequencies { freqs: Vec<f64> },
}

/// Default Gaussian encoding scale.
pub const DEFAULT_GAUSSIAN_SIGMA: f64 = 10.0;
/// Default number of Gaussian frequencies, matching ten sinusoidal octaves.
pub const DEFAULT_GAUSSIAN_FEATURES: usize = 10;

fn default_gaussian_features() -> usize {
    DEFAULT_GAUSSIAN_FEATURES
}

fn default_gaussian_sigma() -> f64 {
    DEFAULT_GAUSSIAN_SIGMA
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Identity,
    Sinusoidal(Vec<f64>),
    Gaussian(Vec<f64>),
    Aux(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    spec: EncoderSpec,
    kind: Kind,
}

impl Encoder {
    pub fn new(spec: EncoderSpec) -> Result<Self> {
        let kind = match &spec {
            EncoderSpec::Identity => Kind::Identity,
            EncoderSpec::Sinusoidal { octaves } => {
                if *octaves == 0 || *octaves > 60 {
                    return Err(Error::InvalidConfig(format!(
                        "sinusoidal encoding needs 1..=60 octaves, got {octaves}"
                    )));
                }
                Kind::Sinusoidal((0..*octaves).map(|j| 2f64.powi(j as i32)).collect())
            }
            EncoderSpec::Gaussian { num_features, sigma, seed } => {
                if *num_features == 0 || !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "gaussian encoding needs num_features >= 1 and sigma > 0, got {num_features}, {sigma}"
                    )));
                }
                let normal = Normal::new(0.0, *sigma).expect("sigma validated");
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Kind::Gaussian((0..*num_features).map(|_| normal.sample(&mut rng)).collect())
            }
            EncoderSpec::AuxFrequencies { freqs } => {
                if !freqs.iter().all(|f| f.is_finite()) {
                    return Err(Error::InvalidConfig("aux frequencies must be finite".into()));
                }
                Kind::Aux(freqs.clone())
            }
        };
        Ok(Self { spec, kind })
    }

    pub fn identity() -> Self {
        Self::new(EncoderSpec::Identity).expect("identity is always valid")
    }

    pub fn spec(&self) -> &EncoderSpec {
        &self.spec
    }

    /// Frozen Gaussian frequencies, if this is a Gaussian encoder.
    pub fn gaussian_frequencies(&self) -> Option<&[f64]> {
        match &self.kind {
            Kind::Gaussian(a) => Some(a),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Identity => 1,
            Kind::Sinusoidal(f) | Kind::Gaussian(f) => 2 * f.len() + 1,
            Kind::Aux(f) => f.len() + 1,
        }
    }

    fn write_features(&self, x: f64, out: &mut [f64]) {
        out[0] = x;
        match &self.kind {
            Kind::Identity => {}
            Kind::Sinusoidal(f) | Kind::Gaussian(f) => {
                for (pair, &w) in out[1..].chunks_exact_mut(2).zip(f) {
                    let (s, c) = (w * x).sin_cos();
                    pair[0] = s;
                    pair[1] = c;
                }
            }
            Kind::Aux(f) => {
                for (slot, &w) in out[1..].iter_mut().zip(f) {
                    *slot = (w * x).sin();
                }
            }
        }
    }

    pub fn encode(&self, x: f64) -> Result<Vec<f64>> {
        if !x.is_finite() {
            return Err(Error::NonFinite(format!("coordinate {x}")));
        }
        let mut out = vec![0.0; self.dim()];
        self.write_features(x, &mut out);
        Ok(out)
    }

    /// Row `i` is `encode(xs[i])`.
    pub fn encode_batch(&self, xs: &[f64]) -> Result<Array2<f64>> {
        if let Some(bad) = xs.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("coordinate {bad}")));
        }
        let mut out = Array2::zeros((xs.len(), self.dim()));
        for (mut row, &x) in out.rows_mut().into_iter().zip(xs) {
            self.write_features(x, row.as_slice_mut().expect("rows of a standard array are contiguous"));
        }
        Ok(out)
    }
}
