use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fibnet::encodings::{EncoderSpec, DEFAULT_GAUSSIAN_FEATURES};
use fibnet::experiments::{self, dump_activations, encoder_for_model, ExperimentConfig, ExperimentKind};
use fibnet::nn::DenseNetwork;
use fibnet::{Error, Result};

#[derive(Parser)]
#[command(name = "fibnet", version, about = "Fibonacci network experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its reports.
    Run {
        /// leapfrog, pe-recon, noise-bench, psine or dump-activations.
        experiment: ExperimentKind,
        /// JSON config; omitted keys take the experiment's defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replace the seed list (repeatable).
        #[arg(long = "seed")]
        seeds: Vec<u64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Put the loss on the final FibNet block only.
        #[arg(long)]
        no_block_loss: bool,
        #[arg(long)]
        epochs: Option<usize>,
        /// Use a Gaussian positional encoding with this scale.
        #[arg(long)]
        pe_sigma: Option<f64>,
    },
    /// Write the last-hidden-layer activations of a leapfrog model over [0, 1].
    DumpActivations {
        #[arg(long)]
        model: PathBuf,
        /// Destination CSV.
        #[arg(long)]
        out: PathBuf,
        /// Leapfrog config listing the input variants.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Loads `path` (or the defaults of `kinds[0]`) and checks that it configures
/// one of `kinds`.
fn load_config(kinds: &[ExperimentKind], path: Option<&PathBuf>) -> Result<ExperimentConfig> {
    let Some(path) = path else {
        return Ok(ExperimentConfig::defaults(kinds[0]));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    let config = ExperimentConfig::from_json(&text)?;
    if !kinds.contains(&config.experiment) {
        return Err(Error::InvalidConfig(format!(
            "{} configures `{}`, not `{}`",
            path.display(),
            config.experiment,
            kinds[0]
        )));
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            experiment,
            config,
            seeds,
            out,
            no_block_loss,
            epochs,
            pe_sigma,
        } => {
            let mut config = load_config(&[experiment], config.as_ref())?;
            if !seeds.is_empty() {
                config.seeds = seeds;
            }
            if let Some(out) = out {
                config.output_dir = out;
            }
            if no_block_loss {
                config.block_loss = false;
            }
            if let Some(epochs) = epochs {
                config.epochs = epochs;
            }
            if let Some(s) = pe_sigma {
                config.encoder = match config.encoder {
                    EncoderSpec::Gaussian { num_features, seed, .. } => EncoderSpec::Gaussian {
                        num_features,
                        sigma: s,
                        seed,
                    },
                    _ => EncoderSpec::Gaussian {
                        num_features: DEFAULT_GAUSSIAN_FEATURES,
                        sigma: s,
                        seed: 0,
                    },
                };
            }
            config.validate()?;
            let report = experiments::run(&config)?;
            std::fs::create_dir_all(&config.output_dir)?;
            report.write(&config.output_dir)?;
            std::fs::write(config.output_dir.join("config.json"), config.to_json())?;
            println!("variant,noise_sigma,runs,median_train_mse,median_test_mse");
            for a in &report.aggregates {
                let sigma = a.noise_sigma.map(|s| s.to_string()).unwrap_or_default();
                println!(
                    "{},{sigma},{},{:.6e},{:.6e}",
                    a.variant, a.runs, a.median_train_mse, a.median_test_mse
                );
            }
            eprintln!("wrote {}", config.output_dir.display());
        }
        Command::DumpActivations { model, out, config } => {
            let net = DenseNetwork::load(&model)?;
            let kinds = [ExperimentKind::Leapfrog, ExperimentKind::DumpActivations];
            let config = load_config(&kinds, config.as_ref())?;
            let encoder = encoder_for_model(&config, &net)?;
            let table = dump_activations(&net, &encoder)?;
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&out, table.to_csv())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fibnet: {e}");
            ExitCode::FAILURE
        }
    }
}
