//! Seeded experiment runners with CSV/JSON reporting.
//!
//! Every runner expands its config into independent `(variant, seed)` jobs,
//! runs them in parallel, and reduces the results in a fixed order so that
//! reports are reproducible byte for byte.

mod activations;
mod config;
mod leapfrog;
mod noise_bench;
mod pe_recon;
mod psine;
mod report;

use std::time::Instant;

use ndarray::{Array1, ArrayView1};
use rayon::prelude::*;

use crate::Result;

pub use activations::{
    dump_activations, encoder_for_model, half_interval_mismatch, periodicity_shift, NeuronPeriodicity,
};
pub use config::{ExperimentConfig, ExperimentKind, NetworkSpec, SignalSpec};
pub use leapfrog::{aux_variant_name, run_leapfrog};
pub use noise_bench::{run_noise_bench, NOISE_BENCH_VARIANTS};
pub use pe_recon::run_pe_recon;
pub use psine::{run_psine, PSINE_FULL, PSINE_HALF};
pub use report::{
    aggregate, aggregate_csv, median, parse_runs_csv, runs_csv, AggregateRow, ExperimentReport,
    Figure, RunRow, Table,
};

/// Runs the experiment named in `config`.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::Leapfrog => run_leapfrog(config),
        ExperimentKind::PeRecon => run_pe_recon(config),
        ExperimentKind::NoiseBench => run_noise_bench(config),
        ExperimentKind::Psine => run_psine(config),
        ExperimentKind::DumpActivations => activations::run_dump_activations(config),
    }
}

/// Output of a single training job.
pub(crate) struct JobOutput {
    pub rows: Vec<RunRow>,
    pub figures: Vec<Figure>,
    pub tables: Vec<Table>,
    pub models: Vec<(String, String)>,
    pub seconds: f64,
}

impl JobOutput {
    pub fn new(row: RunRow) -> Self {
        Self {
            rows: vec![row],
            figures: Vec::new(),
            tables: Vec::new(),
            models: Vec::new(),
            seconds: 0.0,
        }
    }
}

/// Runs jobs concurrently and assembles a report in job order.
pub(crate) fn run_jobs<J, F>(jobs: Vec<J>, f: F) -> Result<ExperimentReport>
where
    J: Send,
    F: Fn(J) -> Result<JobOutput> + Sync,
{
    let outputs: Vec<JobOutput> = jobs
        .into_par_iter()
        .map(|job| {
            let start = Instant::now();
            let mut out = f(job)?;
            out.seconds = start.elapsed().as_secs_f64();
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut report = ExperimentReport::default();
    for out in outputs {
        report
            .timings
            .push((out.rows[0].variant.clone(), out.rows[0].seed, out.seconds));
        report.rows.extend(out.rows);
        report.figures.extend(out.figures);
        report.tables.extend(out.tables);
        report.models.extend(out.models);
    }
    report.aggregates = aggregate(&report.rows)?;
    Ok(report)
}

pub(crate) fn mse_vec(pred: &Array1<f64>, target: &[f64]) -> Result<f64> {
    crate::nn::mse(pred.view(), ArrayView1::from(target))
}

pub(crate) fn figure(name: impl Into<String>, xs: &[f64], ys: impl IntoIterator<Item = f64>) -> Figure {
    Figure {
        name: name.into(),
        xs: xs.to_vec(),
        ys: ys.into_iter().collect(),
    }
}

/// Splits `total` inclusive uniform points of `[0, 1]` into even (train)
/// and odd (test) indices.
pub(crate) fn interleaved_grid(total: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = crate::signals::linspace(total, crate::signals::Interval::UNIT, crate::signals::Endpoint::Inclusive)?;
    let (train, test): (Vec<_>, Vec<_>) = grid.iter().enumerate().partition(|(i, _)| i % 2 == 0);
    Ok((
        train.into_iter().map(|(_, &x)| x).collect(),
        test.into_iter().map(|(_, &x)| x).collect(),
    ))
}

/// Sub-seed for a job-specific random stream.
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream)
}
