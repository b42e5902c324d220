use crate::fibnet::{build_block_targets, FibNet};
use crate::signals::{linspace, linspace_signal, Endpoint, Interval};
use crate::train::train_fibnet;
use crate::Result;

use super::leapfrog::CURVE_POINTS;
use super::{figure, mse_vec, run_jobs, ExperimentConfig, ExperimentReport, JobOutput, RunRow};

/// Loss weights: every block, or the final block only for the end-to-end
/// ablation.
pub(crate) fn block_loss_weights(num_blocks: usize, block_loss: bool) -> Vec<f64> {
    if block_loss {
        vec![1.0; num_blocks]
    } else {
        let mut w = vec![0.0; num_blocks];
        w[num_blocks - 1] = 1.0;
        w
    }
}

pub(crate) fn fibnet_variant(block_loss: bool) -> &'static str {
    if block_loss {
        "fibnet"
    } else {
        "fibnet-no-block-loss"
    }
}

/// FibNet whose block `i` is trained on `sin(2^i x)` over `[0, 1]`.
pub fn run_pe_recon(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let hash = config.hash();
    let fib = &config.fibnet;
    let b = fib.num_blocks();
    let grid = linspace_signal(|_| 0.0, config.signal.n_train, Interval::UNIT, Endpoint::Inclusive)?;
    let targets = build_block_targets(&grid, fib)?;
    let top = 2f64.powi(b as i32 - 1);
    // Held-out points strictly between training points.
    let test_xs: Vec<f64> = linspace(config.signal.n_test, Interval::UNIT, Endpoint::Exclusive)?
        .iter()
        .map(|x| x + 0.5 / config.signal.n_test as f64)
        .collect();
    let test_ys: Vec<f64> = test_xs.iter().map(|x| (top * x).sin()).collect();
    let curve_xs = linspace(CURVE_POINTS, Interval::UNIT, Endpoint::Inclusive)?;
    let weights = block_loss_weights(b, config.block_loss);
    let variant = fibnet_variant(config.block_loss);

    run_jobs(config.seeds.clone(), |seed| {
        let mut net = FibNet::init(fib.clone(), seed)?;
        let fit = train_fibnet(&mut net, &targets, &weights, &config.train_config())?;
        let test_pred = net.predict(&test_xs)?;
        let mut out = JobOutput::new(RunRow {
            experiment: config.experiment.to_string(),
            variant: variant.to_string(),
            seed,
            noise_sigma: None,
            train_mse: fit.per_block[b - 1],
            test_mse: mse_vec(&test_pred, &test_ys)?,
            test_mse_noisy: None,
            per_block_mse: fit.per_block.clone(),
            config_hash: hash.clone(),
        });
        for (i, curve) in net.forward(&curve_xs)?.into_iter().enumerate() {
            out.figures.push(figure(format!("pe_recon_{variant}_seed{seed}_block{i}"), &curve_xs, curve));
        }
        out.models.push((format!("pe_recon_{variant}_seed{seed}"), net.to_json()));
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::ExperimentKind;
    use crate::fibnet::BlockDims;

    #[test]
    fn weights() {
        assert_eq!(block_loss_weights(3, true), vec![1.0, 1.0, 1.0]);
        assert_eq!(block_loss_weights(3, false), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn tiny_run() {
        let mut config = ExperimentConfig::defaults(ExperimentKind::PeRecon);
        config.seeds = vec![1];
        config.epochs = 20;
        config.signal.n_train = 64;
        config.signal.n_test = 63;
        config.fibnet.block_dims = vec![BlockDims::new(4, 1); 3];
        let report = run_pe_recon(&config).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].per_block_mse.len(), 3);
        assert_eq!(report.figures.len(), 3);
        assert_eq!(report.rows[0].train_mse, report.rows[0].per_block_mse[2]);
    }
}
