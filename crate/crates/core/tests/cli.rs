use std::path::Path;
use std::process::{Command, Output};

use fibnet::experiments::{parse_runs_csv, ExperimentConfig};
use fibnet::nn::DenseNetwork;

fn fibnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const TINY_LEAPFROG: &str = r#"{"experiment": "leapfrog", "seeds": [0, 1], "epochs": 30}"#;

#[test]
fn leapfrog_run_writes_reports_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "leap.json", TINY_LEAPFROG);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out_dir in [&a, &b] {
        let out = fibnet(&["run", "leapfrog", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let runs = std::fs::read_to_string(a.join("runs.csv")).unwrap();
    assert_eq!(runs, std::fs::read_to_string(b.join("runs.csv")).unwrap());
    let rows = parse_runs_csv(&runs).unwrap();
    assert_eq!(rows.len(), 6);
    for file in ["aggregate.csv", "timing.csv", "config.json", "figures/leapfrog_target.csv"] {
        assert!(a.join(file).is_file(), "{file}");
    }
    assert!(a.join("models/leapfrog_aux_256_128_seed1.json").is_file());
    let saved = ExperimentConfig::from_json(&std::fs::read_to_string(a.join("config.json")).unwrap()).unwrap();
    assert_eq!(saved.epochs, 30);
    assert_eq!(saved.hash(), rows[0].config_hash);
}

#[test]
fn seed_and_epoch_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "leap.json", TINY_LEAPFROG);
    let out_dir = dir.path().join("o");
    let out = fibnet(&[
        "run", "leapfrog", "--config", &cfg, "--seed", "7", "--epochs", "5", "--out", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = parse_runs_csv(&std::fs::read_to_string(out_dir.join("runs.csv")).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.seed == 7));
    assert_eq!(rows.len(), 3);
}

#[test]
fn dump_activations_of_trained_and_zero_models() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "leap.json", TINY_LEAPFROG);
    let run_dir = dir.path().join("run");
    let out = fibnet(&["run", "leapfrog", "--config", &cfg, "--out", run_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));

    let model = run_dir.join("models/leapfrog_aux_256_128_seed0.json");
    let csv = dir.path().join("acts/trained.csv");
    let out = fibnet(&[
        "dump-activations", "--model", model.to_str().unwrap(), "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1001);
    assert_eq!(lines[0].split(',').count(), 8);
    assert!(lines[0].starts_with("neuron_0,"));

    let zero = dir.path().join("zero.json");
    DenseNetwork::zeros(3, 8, 2).unwrap().save(&zero).unwrap();
    let csv = dir.path().join("zero.csv");
    let out = fibnet(&["dump-activations", "--model", zero.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    for line in text.lines().skip(1) {
        assert!(line.split(',').all(|v| v.parse::<f64>().unwrap() == 0.0));
    }
}

#[test]
fn dump_activations_rejects_missing_and_corrupt_models() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("a.csv");
    let out = fibnet(&["dump-activations", "--model", "/nonexistent/model.json", "--out", out_csv.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("fibnet:"));
    let bad = write(dir.path(), "bad.json", "{\"format_version\": 1, \"layers\": [");
    let out = fibnet(&["dump-activations", "--model", &bad, "--out", out_csv.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(!out_csv.exists());
}

#[test]
fn config_errors_exit_nonzero_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.json", r#"{"experiment": "leapfrog", "epoch": 3}"#);
    let out = fibnet(&["run", "leapfrog", "--config", &unknown]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("epoch"), "{}", stderr(&out));

    let other = write(dir.path(), "o.json", r#"{"experiment": "psine"}"#);
    let out = fibnet(&["run", "leapfrog", "--config", &other]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("psine"));

    let invalid = write(dir.path(), "i.json", r#"{"experiment": "leapfrog", "seeds": []}"#);
    let out = fibnet(&["run", "leapfrog", "--config", &invalid]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("seeds"));

    let out = fibnet(&["run", "leapfrog", "--config", "/nonexistent.json"]);
    assert!(!out.status.success());

    let out = fibnet(&["run", "no-such-experiment"]);
    assert!(!out.status.success());
}

#[test]
fn no_block_loss_flag_selects_ablation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "pe.json",
        r#"{"experiment": "pe-recon", "seeds": [0], "epochs": 3,
            "signal": {"n_train": 32, "n_test": 31},
            "fibnet": {"block_dims": [{"width": 4, "depth": 1}, {"width": 4, "depth": 1}, {"width": 4, "depth": 1}]}}"#,
    );
    let out_dir = dir.path().join("o");
    let out = fibnet(&["run", "pe-recon", "--config", &cfg, "--no-block-loss", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = parse_runs_csv(&std::fs::read_to_string(out_dir.join("runs.csv")).unwrap()).unwrap();
    assert_eq!(rows[0].variant, "fibnet-no-block-loss");
    assert_eq!(rows[0].per_block_mse.len(), 3);
}

#[test]
fn pe_sigma_switches_to_gaussian_encoding() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "nb.json",
        r#"{"experiment": "noise-bench", "seeds": [0], "epochs": 2,
            "network": {"width": 4, "depth": 1},
            "signal": {"n_train": 20, "n_test": 20, "noise_sigmas": [1.0]},
            "fibnet": {"block_dims": [{"width": 4, "depth": 1}, {"width": 4, "depth": 1}]}}"#,
    );
    let out_dir = dir.path().join("o");
    let out = fibnet(&["run", "noise-bench", "--config", &cfg, "--pe-sigma", "3.5", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let saved = std::fs::read_to_string(out_dir.join("config.json")).unwrap();
    let saved = ExperimentConfig::from_json(&saved).unwrap();
    assert_eq!(
        saved.encoder,
        fibnet::encodings::EncoderSpec::Gaussian { num_features: 10, sigma: 3.5, seed: 0 }
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("simple+pe,1,1,"), "{stdout}");
}
