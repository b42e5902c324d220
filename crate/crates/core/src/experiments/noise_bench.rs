use ndarray::ArrayView1;

use crate::encodings::{Encoder, EncoderSpec};
use crate::fibnet::{build_block_targets, FibNet};
use crate::nn::DenseNetwork;
use crate::signals::{add_uniform_noise, random_spline_signal, Interval, SampledSignal};
use crate::train::{train_fibnet, train_mlp};
use crate::Result;

use super::pe_recon::{block_loss_weights, fibnet_variant};
use super::{derive_seed, interleaved_grid, mse_vec, run_jobs, ExperimentConfig, ExperimentReport, JobOutput, RunRow};

/// Variant names in report order.
pub const NOISE_BENCH_VARIANTS: [&str; 3] = ["simple", "simple+pe", "fibnet"];

#[derive(Debug, Clone, Copy)]
enum Variant {
    Simple,
    SimplePe,
    Fib,
}

/// Clean and noisy train/test samples of one random spline.
pub(crate) struct NoisyDataset {
    pub train_noisy: SampledSignal,
    pub test_clean: SampledSignal,
    pub test_noisy: SampledSignal,
}

/// Draws the spline for `seed` and samples it on `n_train + n_test` uniform
/// points of `[0, 1]`: even indices train, odd indices test. Both halves get
/// independent `U[-sigma, sigma]` noise.
pub(crate) fn noisy_dataset(config: &ExperimentConfig, sigma: f64, sigma_idx: usize, seed: u64) -> Result<NoisyDataset> {
    let s = &config.signal;
    let (spline, _) = random_spline_signal(s.n_ctrl, seed, Interval::UNIT)?;
    let (train_xs, test_xs) = interleaved_grid(s.n_train + s.n_test)?;
    let train_ys = spline.eval_many(&train_xs)?;
    let test_ys = spline.eval_many(&test_xs)?;
    let train_clean = SampledSignal::new(train_xs, train_ys, Interval::UNIT)?;
    let test_clean = SampledSignal::new(test_xs, test_ys, Interval::UNIT)?;
    let stream = 2 * sigma_idx as u64;
    Ok(NoisyDataset {
        train_noisy: add_uniform_noise(&train_clean, sigma, derive_seed(seed, stream + 1))?,
        test_noisy: add_uniform_noise(&test_clean, sigma, derive_seed(seed, stream + 2))?,
        test_clean,
    })
}

/// Random-spline regression under uniform noise: a plain MLP, the same MLP
/// behind a positional encoding, and a low-pass FibNet.
pub fn run_noise_bench(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let hash = config.hash();
    let pe = Encoder::new(config.encoder.clone())?;
    let identity = Encoder::new(EncoderSpec::Identity)?;
    let weights = block_loss_weights(config.fibnet.num_blocks(), config.block_loss);
    let train_cfg = config.train_config();

    let mut jobs = Vec::new();
    for (sigma_idx, &sigma) in config.signal.noise_sigmas.iter().enumerate() {
        for &seed in &config.seeds {
            for variant in [Variant::Simple, Variant::SimplePe, Variant::Fib] {
                jobs.push((sigma_idx, sigma, seed, variant));
            }
        }
    }

    run_jobs(jobs, |(sigma_idx, sigma, seed, variant)| {
        let data = noisy_dataset(config, sigma, sigma_idx, seed)?;
        let (name, train_mse, pred) = match variant {
            Variant::Simple | Variant::SimplePe => {
                let (enc, name) = match variant {
                    Variant::Simple => (&identity, NOISE_BENCH_VARIANTS[0]),
                    _ => (&pe, NOISE_BENCH_VARIANTS[1]),
                };
                let mut net = DenseNetwork::init(enc.dim(), config.network.width, config.network.depth, seed)?;
                let train_mse = train_mlp(
                    &mut net,
                    enc.encode_batch(data.train_noisy.xs())?.view(),
                    ArrayView1::from(data.train_noisy.ys()),
                    &train_cfg,
                )?;
                let pred = net.forward(enc.encode_batch(data.test_clean.xs())?.view())?;
                (name.to_string(), train_mse, pred)
            }
            Variant::Fib => {
                let targets = build_block_targets(&data.train_noisy, &config.fibnet)?;
                let mut net = FibNet::init(config.fibnet.clone(), seed)?;
                train_fibnet(&mut net, &targets, &weights, &train_cfg)?;
                let train_pred = net.predict(data.train_noisy.xs())?;
                let train_mse = mse_vec(&train_pred, data.train_noisy.ys())?;
                let name = match config.block_loss {
                    true => NOISE_BENCH_VARIANTS[2].to_string(),
                    false => fibnet_variant(false).to_string(),
                };
                (name, train_mse, net.predict(data.test_clean.xs())?)
            }
        };
        Ok(JobOutput::new(RunRow {
            experiment: config.experiment.to_string(),
            variant: name,
            seed,
            noise_sigma: Some(sigma),
            train_mse,
            test_mse: mse_vec(&pred, data.test_clean.ys())?,
            test_mse_noisy: Some(mse_vec(&pred, data.test_noisy.ys())?),
            per_block_mse: Vec::new(),
            config_hash: hash.clone(),
        }))
    })
}
