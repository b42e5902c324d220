use crate::encodings::{Encoder, EncoderSpec};
use crate::nn::DenseNetwork;
use crate::signals::{linspace, sample_sine, Endpoint, Interval};
use crate::train::train_mlp;
use crate::Result;

use super::{figure, mse_vec, run_jobs, ExperimentConfig, ExperimentReport, JobOutput, RunRow};

/// `identity` for no auxiliary inputs, otherwise e.g. `aux[256+128]`.
pub fn aux_variant_name(freqs: &[f64]) -> String {
    if freqs.is_empty() {
        "identity".to_string()
    } else {
        let parts: Vec<String> = freqs.iter().map(|f| f.to_string()).collect();
        format!("aux[{}]", parts.join("+"))
    }
}

/// File-name friendly form of a variant name.
pub(crate) fn slug(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect();
    while out.ends_with('_') {
        out.pop();
    }
    out
}

pub(crate) struct LeapfrogFit {
    pub net: DenseNetwork,
    pub encoder: Encoder,
    pub train_mse: f64,
    pub test_mse: f64,
}

/// Trains one width/depth-configured MLP on `sin(frequency x)` over `[0, 0.5]`
/// and scores it on `(0.5, 1]`.
pub(crate) fn fit_leapfrog(config: &ExperimentConfig, freqs: &[f64], seed: u64) -> Result<LeapfrogFit> {
    let encoder = Encoder::new(EncoderSpec::AuxFrequencies {
        freqs: freqs.to_vec(),
    })?;
    let signal = &config.signal;
    let train = sample_sine(signal.frequency, signal.n_train, Interval::new(0.0, 0.5)?)?;
    let step = 0.5 / signal.n_test as f64;
    let test_xs: Vec<f64> = (1..=signal.n_test).map(|k| 0.5 + k as f64 * step).collect();
    let test_ys: Vec<f64> = test_xs.iter().map(|x| (signal.frequency * x).sin()).collect();

    let inputs = encoder.encode_batch(train.xs())?;
    let mut net = DenseNetwork::init(encoder.dim(), config.network.width, config.network.depth, seed)?;
    let train_mse = train_mlp(
        &mut net,
        inputs.view(),
        ndarray::ArrayView1::from(train.ys()),
        &config.train_config(),
    )?;
    let pred = net.forward(encoder.encode_batch(&test_xs)?.view())?;
    let test_mse = mse_vec(&pred, &test_ys)?;
    Ok(LeapfrogFit {
        net,
        encoder,
        train_mse,
        test_mse,
    })
}

pub(crate) const CURVE_POINTS: usize = 1000;

/// Plain MLPs on `sin(512 x)` given the raw coordinate plus optional lower
/// tones; trained on `[0, 0.5]`, evaluated on the unseen `(0.5, 1]`.
pub fn run_leapfrog(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let hash = config.hash();
    let jobs: Vec<(Vec<f64>, u64)> = config
        .signal
        .aux_variants
        .iter()
        .flat_map(|v| config.seeds.iter().map(move |&s| (v.clone(), s)))
        .collect();
    let grid = linspace(CURVE_POINTS, Interval::UNIT, Endpoint::Inclusive)?;

    let mut report = run_jobs(jobs, |(freqs, seed)| {
        let fit = fit_leapfrog(config, &freqs, seed)?;
        let variant = aux_variant_name(&freqs);
        let curve = fit.net.forward(fit.encoder.encode_batch(&grid)?.view())?;
        let name = format!("leapfrog_{}_seed{seed}", slug(&variant));
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
        out.figures.push(figure(name.clone(), &grid, curve));
        out.models.push((name, fit.net.to_json()));
        Ok(out)
    })?;

    let truth = grid.iter().map(|x| (config.signal.frequency * x).sin());
    report.figures.push(figure("leapfrog_target", &grid, truth));
    let train = sample_sine(config.signal.frequency, config.signal.n_train, Interval::new(0.0, 0.5)?)?;
    report
        .figures
        .push(figure("leapfrog_train_points", train.xs(), train.ys().iter().copied()));
    Ok(report)
}
