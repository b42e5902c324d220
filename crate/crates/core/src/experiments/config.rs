use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::encodings::{Encoder, EncoderSpec};
use crate::fibnet::{BlockDims, FibNetConfig, TargetMode};
use crate::nn::AdamConfig;
use crate::signals::PsineParams;
use crate::train::TrainConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Leapfrog,
    PeRecon,
    NoiseBench,
    Psine,
    DumpActivations,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Leapfrog,
        ExperimentKind::PeRecon,
        ExperimentKind::NoiseBench,
        ExperimentKind::Psine,
        ExperimentKind::DumpActivations,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Leapfrog => "leapfrog",
            ExperimentKind::PeRecon => "pe-recon",
            ExperimentKind::NoiseBench => "noise-bench",
            ExperimentKind::Psine => "psine",
            ExperimentKind::DumpActivations => "dump-activations",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment {s:?}")))
    }
}

/// Architecture of a plain MLP baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub width: usize,
    pub depth: usize,
}

/// Target signal and sampling parameters. Each experiment reads the fields
/// that concern it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub n_train: usize,
    pub n_test: usize,
    /// Angular frequency of the leapfrog tone, `sin(frequency · x)`.
    pub frequency: f64,
    /// Leapfrog input variants; each entry lists auxiliary angular
    /// frequencies, the empty list meaning the raw coordinate only.
    pub aux_variants: Vec<Vec<f64>>,
    pub noise_sigmas: Vec<f64>,
    pub n_ctrl: usize,
    pub psine: PsineParams,
}

/// One experiment, mirrored field-for-field by the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seeds: Vec<u64>,
    pub epochs: usize,
    pub optimizer: AdamConfig,
    pub network: NetworkSpec,
    /// Positional encoding of the "simple NN + P.E." baseline.
    pub encoder: EncoderSpec,
    pub fibnet: FibNetConfig,
    pub signal: SignalSpec,
    /// When false, only the final FibNet block contributes to the loss.
    pub block_loss: bool,
    pub output_dir: PathBuf,
}

fn dims(list: &[(usize, usize)]) -> Vec<BlockDims> {
    list.iter().map(|&(w, d)| BlockDims::new(w, d)).collect()
}

impl ExperimentConfig {
    /// Default configuration of `kind`; every other experiment-specific
    /// value a config file omits is taken from here.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base_signal = SignalSpec {
            n_train: 100,
            n_test: 100,
            frequency: 512.0,
            aux_variants: vec![vec![], vec![256.0], vec![256.0, 128.0]],
            noise_sigmas: vec![0.1, 0.5, 1.0, 5.0, 10.0, 20.0],
            n_ctrl: 30,
            psine: PsineParams::default(),
        };
        let mut config = Self {
            experiment: kind,
            seeds: vec![0, 1, 2, 3, 4],
            epochs: 20_000,
            optimizer: AdamConfig::default(),
            network: NetworkSpec { width: 8, depth: 2 },
            encoder: EncoderSpec::Sinusoidal { octaves: 10 },
            fibnet: FibNetConfig::default(),
            signal: base_signal,
            block_loss: true,
            output_dir: PathBuf::from(format!("out/{}", kind.name())),
        };
        match kind {
            ExperimentKind::Leapfrog | ExperimentKind::DumpActivations => {}
            ExperimentKind::PeRecon => {
                config.epochs = 30_000;
                config.optimizer.lr = 3e-3;
                config.signal.n_train = 256;
                config.signal.n_test = 255;
                let mut schedule = vec![(32, 3)];
                schedule.extend(std::iter::repeat_n((32, 2), 9));
                config.fibnet = FibNetConfig {
                    block_dims: dims(&schedule),
                    target_mode: TargetMode::Spoonfed,
                    cutoff_base: 2.0,
                };
            }
            ExperimentKind::NoiseBench => {
                config.epochs = 10_000;
                config.signal.n_train = 300;
                config.signal.n_test = 300;
                config.network = NetworkSpec { width: 64, depth: 3 };
                config.fibnet = FibNetConfig {
                    block_dims: dims(&[(32, 3), (16, 2), (8, 2), (8, 2)]),
                    target_mode: TargetMode::Lowpass,
                    cutoff_base: 2.0,
                };
            }
            ExperimentKind::Psine => {
                config.epochs = 3_000;
                config.optimizer.lr = 5e-3;
                config.signal.n_train = 4096;
                config.signal.n_test = 4095;
                config.network = NetworkSpec { width: 64, depth: 4 };
            }
        }
        config
    }

    /// Parses a JSON config. Omitted keys fall back to the defaults of the
    /// named experiment (nested objects merge key by key); unknown keys are
    /// rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let user: Value = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let Value::Object(map) = &user else {
            return Err(Error::InvalidConfig("config must be a JSON object".into()));
        };
        let kind = match map.get("experiment") {
            Some(Value::String(s)) => s.parse::<ExperimentKind>()?,
            Some(_) => return Err(Error::InvalidConfig("`experiment` must be a string".into())),
            None => return Err(Error::InvalidConfig("missing `experiment`".into())),
        };
        let mut merged = serde_json::to_value(Self::defaults(kind)).expect("defaults serialize");
        merge(&mut merged, user);
        let config: Self =
            serde_json::from_value(merged).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            adam: self.optimizer,
        }
    }

    /// SHA-256 of the canonical JSON of the fully resolved config, excluding
    /// the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))[..16].to_string()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.seeds.is_empty() {
            return bad("seeds must be non-empty".into());
        }
        self.train_config().validate()?;
        if self.network.width == 0 || self.network.depth == 0 {
            return bad("network width and depth must be >= 1".into());
        }
        Encoder::new(self.encoder.clone())?;
        self.fibnet.validate()?;
        let s = &self.signal;
        if s.n_train < 2 || s.n_test < 2 {
            return bad("n_train and n_test must be >= 2".into());
        }
        if !s.frequency.is_finite() {
            return bad("signal frequency must be finite".into());
        }
        s.psine.validate()?;
        match self.experiment {
            ExperimentKind::Leapfrog | ExperimentKind::DumpActivations => {
                if s.aux_variants.is_empty() {
                    return bad("aux_variants must list at least one variant".into());
                }
                for v in &s.aux_variants {
                    Encoder::new(EncoderSpec::AuxFrequencies { freqs: v.clone() })?;
                }
            }
            ExperimentKind::PeRecon => {
                if self.fibnet.target_mode != TargetMode::Spoonfed {
                    return bad("pe-recon trains spoon-fed targets; set fibnet.target_mode to \"spoonfed\"".into());
                }
            }
            ExperimentKind::NoiseBench => {
                if s.noise_sigmas.is_empty() || s.noise_sigmas.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                    return bad("noise_sigmas must be a non-empty list of values >= 0".into());
                }
                if s.n_ctrl < 4 {
                    return bad("n_ctrl must be >= 4".into());
                }
                if s.n_test > s.n_train || s.n_train - s.n_test > 1 {
                    return bad("noise-bench interleaves samples: n_test must be n_train or n_train - 1".into());
                }
            }
            ExperimentKind::Psine => {
                if self.epochs < 2 {
                    return bad("psine needs at least 2 epochs for the half-budget run".into());
                }
                if s.n_test > s.n_train || s.n_train - s.n_test > 1 {
                    return bad("psine interleaves samples: n_test must be n_train or n_train - 1".into());
                }
            }
        }
        Ok(())
    }
}

fn merge(base: &mut Value, user: Value) {
    match (base, user) {
        (Value::Object(b), Value::Object(u)) => {
            // Tagged enums switch variant wholesale.
            if b.get("kind").is_some() && u.get("kind").is_some() && b.get("kind") != u.get("kind") {
                *b = u;
                return;
            }
            for (k, v) in u {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for kind in ExperimentKind::ALL {
            let c = ExperimentConfig::defaults(kind);
            c.validate().unwrap();
            let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c);
            assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
        }
    }

    #[test]
    fn partial_config_merges_with_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"experiment": "noise-bench", "seeds": [3], "signal": {"noise_sigmas": [1.0]}}"#,
        )
        .unwrap();
        assert_eq!(c.seeds, vec![3]);
        assert_eq!(c.signal.noise_sigmas, vec![1.0]);
        assert_eq!(c.signal.n_train, 300);
        assert_eq!(c.network, NetworkSpec { width: 64, depth: 3 });
    }

    #[test]
    fn encoder_kind_switch_replaces_object() {
        let c = ExperimentConfig::from_json(
            r#"{"experiment": "noise-bench", "encoder": {"kind": "gaussian", "num_features": 8, "sigma": 10.0, "seed": 1}}"#,
        )
        .unwrap();
        assert!(matches!(c.encoder, EncoderSpec::Gaussian { num_features: 8, .. }));
    }

    #[test]
    fn unknown_keys_fail_closed() {
        assert!(ExperimentConfig::from_json(r#"{"experiment": "psine", "epoch": 5}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "psine", "signal": {"nn": 5}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "nope"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"seeds": [1]}"#).is_err());
        assert!(ExperimentConfig::from_json("[]").is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"experiment": "leapfrog", "seeds": []}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "leapfrog", "epochs": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(
            r#"{"experiment": "pe-recon", "fibnet": {"target_mode": "lowpass"}}"#
        )
        .is_err());
        assert!(ExperimentConfig::from_json(
            r#"{"experiment": "noise-bench", "signal": {"noise_sigmas": [-1.0]}}"#
        )
        .is_err());
    }

    #[test]
    fn hash_tracks_content_not_output_dir() {
        let a = ExperimentConfig::defaults(ExperimentKind::Leapfrog);
        let mut b = a.clone();
        b.output_dir = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.epochs += 1;
        assert_ne!(a.hash(), b.hash());
    }
}
