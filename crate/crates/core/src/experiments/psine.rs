use ndarray::{Array2, ArrayView1};

use crate::nn::DenseNetwork;
use crate::signals::{linspace, Endpoint, Interval};
use crate::train::train_mlp_snapshots;
use crate::Result;

use super::leapfrog::CURVE_POINTS;
use super::{figure, interleaved_grid, mse_vec, run_jobs, ExperimentConfig, ExperimentReport, JobOutput, RunRow};

/// Variant trained for the full epoch budget.
pub const PSINE_FULL: &str = "full";
/// Variant trained for half the epoch budget.
pub const PSINE_HALF: &str = "half";

/// Plain MLP (raw `x`, no encoding) fit to the psine chirp.
///
/// The half-budget variant is the snapshot of the same run after
/// `epochs / 2` steps, which is identical to training that long outright.
pub fn run_psine(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let params = config.signal.psine;
    run_psine_target(config, |x| params.value(x))
}

pub(crate) fn run_psine_target<F>(config: &ExperimentConfig, target: F) -> Result<ExperimentReport>
where
    F: Fn(f64) -> f64 + Sync,
{
    let hash = config.hash();
    let s = &config.signal;
    let (train_xs, test_xs) = interleaved_grid(s.n_train + s.n_test)?;
    let train_ys: Vec<f64> = train_xs.iter().map(|&x| target(x)).collect();
    let test_ys: Vec<f64> = test_xs.iter().map(|&x| target(x)).collect();
    let column = |xs: &[f64]| Array2::from_shape_vec((xs.len(), 1), xs.to_vec()).expect("column shape");
    let (train_in, test_in) = (column(&train_xs), column(&test_xs));
    let curve_xs = linspace(CURVE_POINTS, Interval::UNIT, Endpoint::Inclusive)?;
    let curve_in = column(&curve_xs);
    let cfg = config.train_config();
    let half = config.epochs / 2;

    let mut report = run_jobs(config.seeds.clone(), |seed| {
        let mut net = DenseNetwork::init(1, config.network.width, config.network.depth, seed)?;
        let snaps = train_mlp_snapshots(&mut net, train_in.view(), ArrayView1::from(&train_ys[..]), &cfg, &[half])?;
        let row = |variant: &str, net: &DenseNetwork| -> Result<RunRow> {
            Ok(RunRow {
                experiment: config.experiment.to_string(),
                variant: variant.to_string(),
                seed,
                noise_sigma: None,
                train_mse: mse_vec(&net.forward(train_in.view())?, &train_ys)?,
                test_mse: mse_vec(&net.forward(test_in.view())?, &test_ys)?,
                test_mse_noisy: None,
                per_block_mse: Vec::new(),
                config_hash: hash.clone(),
            })
        };
        let mut out = JobOutput::new(row(PSINE_FULL, &net)?);
        out.rows.push(row(PSINE_HALF, &snaps[0])?);
        for (variant, n) in [(PSINE_FULL, &net), (PSINE_HALF, &snaps[0])] {
            out.figures.push(figure(
                format!("psine_{variant}_seed{seed}"),
                &curve_xs,
                n.forward(curve_in.view())?,
            ));
            out.models.push((format!("psine_{variant}_seed{seed}"), n.to_json()));
        }
        Ok(out)
    })?;
    report.figures.push(figure("psine_target", &curve_xs, curve_xs.iter().map(|&x| target(x))));
    report.figures.push(figure("psine_train_points", &train_xs, train_ys.iter().copied()));
    Ok(report)
}
