use std::f64::consts::TAU;

use crate::encodings::{Encoder, EncoderSpec};
use crate::nn::DenseNetwork;
use crate::signals::{linspace, Endpoint, Interval};
use crate::{Error, Result};

use super::leapfrog::{aux_variant_name, fit_leapfrog, slug, CURVE_POINTS};
use super::{run_jobs, ExperimentConfig, ExperimentReport, JobOutput, RunRow, Table};

/// Activations of the last hidden layer over `CURVE_POINTS` uniform points of
/// `[0, 1]`: one column per neuron.
pub fn dump_activations(net: &DenseNetwork, encoder: &Encoder) -> Result<Table> {
    if encoder.dim() != net.in_dim() {
        return Err(Error::ShapeMismatch(format!(
            "encoder produces {} features, model expects {}",
            encoder.dim(),
            net.in_dim()
        )));
    }
    let grid = linspace(CURVE_POINTS, Interval::UNIT, Endpoint::Inclusive)?;
    let acts = net.hidden_activations(encoder.encode_batch(&grid)?.view())?;
    Ok(Table {
        name: "activations".into(),
        header: (0..acts.ncols()).map(|j| format!("neuron_{j}")).collect(),
        rows: acts.rows().into_iter().map(|r| r.to_vec()).collect(),
    })
}

/// Shift used to compare the two halves of `[0, 1]`: the whole number of
/// encoder periods closest to `0.5`. For `aux[256+128]` this is ten periods
/// of `sin(128 x)`, about `0.4909`. Without auxiliary tones the shift is `0.5`.
pub fn periodicity_shift(freqs: &[f64]) -> f64 {
    let lowest = freqs
        .iter()
        .map(|f| f.abs())
        .filter(|f| *f > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !lowest.is_finite() {
        return 0.5;
    }
    let period = TAU / lowest;
    let periods = (0.5 / period).round().max(1.0);
    periods * period
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeuronPeriodicity {
    pub neuron: usize,
    /// Mean squared difference between `a(x)` and `a(x + shift)`.
    pub mismatch: f64,
    /// Variance of the activation over the whole grid.
    pub variance: f64,
}

impl NeuronPeriodicity {
    /// `mismatch / variance`; a constant neuron counts as perfectly periodic.
    pub fn ratio(&self) -> f64 {
        if self.variance > 0.0 {
            self.mismatch / self.variance
        } else if self.mismatch == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Compares each last-hidden-layer neuron on the grid points `x` of `[0, 1]`
/// with `x + shift ≤ 1` against its value at `x + shift`.
pub fn half_interval_mismatch(
    net: &DenseNetwork,
    encoder: &Encoder,
    shift: f64,
) -> Result<Vec<NeuronPeriodicity>> {
    if !(shift > 0.0 && shift < 1.0) {
        return Err(Error::InvalidArgument(format!("shift {shift} outside (0, 1)")));
    }
    let grid = linspace(CURVE_POINTS, Interval::UNIT, Endpoint::Inclusive)?;
    let lower: Vec<f64> = grid.iter().copied().filter(|x| x + shift <= 1.0).collect();
    let upper: Vec<f64> = lower.iter().map(|x| x + shift).collect();
    let full = net.hidden_activations(encoder.encode_batch(&grid)?.view())?;
    let a = net.hidden_activations(encoder.encode_batch(&lower)?.view())?;
    let b = net.hidden_activations(encoder.encode_batch(&upper)?.view())?;
    Ok((0..full.ncols())
        .map(|j| {
            let col = full.column(j);
            let n = col.len() as f64;
            let mean = col.sum() / n;
            let variance = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let mismatch = a
                .column(j)
                .iter()
                .zip(b.column(j).iter())
                .map(|(p, q)| (p - q).powi(2))
                .sum::<f64>()
                / lower.len() as f64;
            NeuronPeriodicity {
                neuron: j,
                mismatch,
                variance,
            }
        })
        .collect())
}

/// Finds the leapfrog variant whose encoder matches the model's input width,
/// preferring the last listed variant.
pub fn encoder_for_model(config: &ExperimentConfig, net: &DenseNetwork) -> Result<Encoder> {
    let freqs = config
        .signal
        .aux_variants
        .iter()
        .rev()
        .find(|v| v.len() + 1 == net.in_dim())
        .ok_or_else(|| {
            Error::InvalidConfig(format!(
                "no leapfrog input variant has {} features",
                net.in_dim()
            ))
        })?;
    Encoder::new(EncoderSpec::AuxFrequencies { freqs: freqs.clone() })
}

/// Trains the last leapfrog variant per seed and records its neuron
/// activations together with the half-interval periodicity measure.
pub(crate) fn run_dump_activations(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let hash = config.hash();
    let freqs = config
        .signal
        .aux_variants
        .last()
        .cloned()
        .ok_or_else(|| Error::InvalidConfig("aux_variants is empty".into()))?;
    let shift = periodicity_shift(&freqs);
    run_jobs(config.seeds.clone(), |seed| {
        let fit = fit_leapfrog(config, &freqs, seed)?;
        let variant = aux_variant_name(&freqs);
        let stem = format!("{}_seed{seed}", slug(&variant));
        let mut table = dump_activations(&fit.net, &fit.encoder)?;
        table.name = format!("activations_{stem}");
        let periodicity = half_interval_mismatch(&fit.net, &fit.encoder, shift)?;
        let summary = Table {
            name: format!("periodicity_{stem}"),
            header: ["neuron", "mismatch", "variance", "ratio"].map(String::from).to_vec(),
            rows: periodicity
                .iter()
                .map(|p| vec![p.neuron as f64, p.mismatch, p.variance, p.ratio()])
                .collect(),
        };
        let mut out = JobOutput::new(RunRow {
            experiment: config.experiment.to_string(),
            variant,
            seed,
            noise_sigma: None,
            train_mse: fit.train_mse,
            test_mse: fit.test_mse,
            test_mse_noisy: None,
            per_block_mse: Vec::new(),
            config_hash: hash.clone(),
        });
        out.tables.push(table);
        out.tables.push(summary);
        out.models.push((format!("leapfrog_{stem}"), fit.net.to_json()));
        Ok(out)
    })
}
