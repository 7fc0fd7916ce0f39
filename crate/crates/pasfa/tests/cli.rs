//! End-to-end tests of the `pasfa` binary: flags, file schemas, exit codes.

use ndarray::Array2;
use pasfa::model::ModelConfig;
use pasfa::simulate::{Trajectory, TrajectorySidecar};
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pasfa")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn write_demo_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("model.json");
    ModelConfig::demo_scalar_arma11().to_file(&path).unwrap();
    path
}

#[test]
fn simulate_writes_csv_and_sidecar_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_demo_config(dir.path());
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let res = run(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--horizon",
            "2000",
            "--seed",
            "1",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{res:?}");
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "trajectory CSVs must be byte-identical");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("k,e_1,x_1,y_1\n"));
    assert_eq!(text.lines().count(), 2001);

    // Sidecars agree on everything except the labeled timestamp.
    let sc = |p: &Path| -> TrajectorySidecar {
        let raw = std::fs::read_to_string(format!("{}.meta.json", p.display())).unwrap();
        serde_json::from_str(&raw).unwrap()
    };
    let (sa, sb) = (sc(&out_a), sc(&out_b));
    assert_eq!(sa.seed, 1);
    assert_eq!(sa.horizon, 2000);
    assert_eq!(sa.model_hash, sb.model_hash);
    assert_eq!(sa.model_hash.len(), 64);
}

#[test]
fn simulate_rejects_nonstationary_model() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ModelConfig::demo_scalar_arma11();
    config.ar_coeffs = vec![vec![1.2]];
    let path = dir.path().join("bad.json");
    config.to_file(&path).unwrap();
    let res = run(&[
        "simulate",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8(res.stderr).unwrap();
    assert!(stderr.contains("NonStationary"), "{stderr}");
}

#[test]
fn simulate_rejects_zero_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_demo_config(dir.path());
    let res = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--horizon",
        "0",
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8(res.stderr).unwrap();
    assert!(stderr.contains("horizon"), "{stderr}");
}

#[test]
fn simulate_missing_config_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&[
        "simulate",
        "--config",
        dir.path().join("nope.json").to_str().unwrap(),
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(3));
}

fn simulate_small(dir: &Path, config: &Path, horizon: &str) -> std::path::PathBuf {
    let traj = dir.join("traj.csv");
    let res = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--horizon",
        horizon,
        "--seed",
        "5",
        "--out",
        traj.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    traj
}

#[test]
fn filter_recursive_emits_diagnostic_columns() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_demo_config(dir.path());
    let traj = simulate_small(dir.path(), &config, "300");
    let out = dir.path().join("est.csv");
    let res = run(&[
        "filter",
        "--config",
        config.to_str().unwrap(),
        "--method",
        "recursive",
        "--out",
        out.to_str().unwrap(),
        traj.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{res:?}");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("k,xhat_1,nu_1,p_post_trace\n"));
    assert_eq!(text.lines().count(), 301);
}

#[test]
fn filter_augmented_emits_diagnostic_columns() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_demo_config(dir.path());
    let traj = simulate_small(dir.path(), &config, "100");
    let out = dir.path().join("est.csv");
    let res = run(&[
        "filter",
        "--config",
        config.to_str().unwrap(),
        "--method",
        "augmented-kalman",
        "--out",
        out.to_str().unwrap(),
        traj.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("k,xhat_1,nu_1,p_post_trace\n"));
}

#[test]
fn filter_batch_oracle_within_cap_writes_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_demo_config(dir.path());
    let traj = simulate_small(dir.path(), &config, "120");
    let out = dir.path().join("est.csv");
    let res = run(&[
        "filter",
        "--config",
        config.to_str().unwrap(),
        "--method",
        "batch-oracle",
        "--out",
        out.to_str().unwrap(),
        traj.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{res:?}");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("k,xhat_1\n"));
    assert_eq!(text.lines().count(), 121);
}

#[test]
fn filter_batch_oracle_cap_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_demo_config(dir.path());
    let traj = simulate_small(dir.path(), &config, "2000");
    let res = run(&[
        "filter",
        "--config",
        config.to_str().unwrap(),
        "--method",
        "batch-oracle",
        "--out",
        dir.path().join("est.csv").to_str().unwrap(),
        traj.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(4));
    let stderr = String::from_utf8(res.stderr).unwrap();
    assert!(stderr.contains("CapExceeded"), "{stderr}");
}

#[test]
fn filter_static_on_zero_observations_gives_zero_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_demo_config(dir.path());
    let traj = Trajectory {
        horizon: 8,
        e: Array2::zeros((8, 1)),
        x: Array2::zeros((8, 1)),
        y: Array2::zeros((8, 1)),
        seed: 0,
    };
    let traj_path = dir.path().join("zeros.csv");
    traj.write_csv_file(&traj_path).unwrap();
    let out = dir.path().join("est.csv");
    let res = run(&[
        "filter",
        "--config",
        config.to_str().unwrap(),
        "--method",
        "static",
        "--out",
        out.to_str().unwrap(),
        traj_path.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("k,xhat_1\n"));
    for line in text.lines().skip(1) {
        let est: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(est, 0.0);
    }
}

#[test]
fn filter_dimension_mismatch_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_demo_config(dir.path());
    // Two-channel trajectory against the scalar model.
    let mut two = ModelConfig::demo_scalar_arma11();
    two.latent_dim = 2;
    two.ar_coeffs = vec![vec![0.1], vec![0.2]];
    two.ma_coeffs = vec![vec![0.0], vec![0.0]];
    two.process_noise_vars = vec![1.0, 1.0];
    two.c = vec![vec![1.0, 0.0]];
    let two_path = dir.path().join("two.json");
    two.to_file(&two_path).unwrap();
    let traj = simulate_small(dir.path(), &two_path, "50");
    let res = run(&[
        "filter",
        "--config",
        config.to_str().unwrap(),
        "--method",
        "recursive",
        "--out",
        dir.path().join("est.csv").to_str().unwrap(),
        traj.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8(res.stderr).unwrap();
    assert!(stderr.contains("DimensionMismatch"), "{stderr}");
}

#[test]
fn compare_single_trial_omits_std_brackets() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_demo_config(dir.path());
    let out = dir.path().join("report");
    let res = run(&[
        "compare",
        "--config",
        config.to_str().unwrap(),
        "--trials",
        "1",
        "--horizon",
        "300",
        "--seed",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{res:?}");
    let table = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(!table.contains('±'), "{table}");
    let json = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(!json.contains("mse_std"));
    assert!(json.contains("\"recursive\""));
    assert!(json.contains("\"static\""));
    assert!(json.contains("\"augmented-kalman\""));
    // Per-trial plot data with the correlation metadata line.
    let plot = std::fs::read_to_string(out.join("trial_000.csv")).unwrap();
    let mut lines = plot.lines();
    assert!(lines.next().unwrap().starts_with("# seed="));
    assert_eq!(lines.next().unwrap(), "k,x_true_1,xhat_recursive_1,xhat_static_1");
}

#[test]
fn compare_multi_trial_has_expected_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_demo_config(dir.path());
    let out = dir.path().join("report");
    let res = run(&[
        "compare",
        "--config",
        config.to_str().unwrap(),
        "--trials",
        "4",
        "--horizon",
        "1000",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let report: pasfa::MetricsReport =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let get = |name: &str| {
        report
            .methods
            .iter()
            .find(|m| m.method == name)
            .unwrap()
            .clone()
    };
    let rec = get("recursive");
    let st = get("static");
    assert!(rec.mse_mean[0] < st.mse_mean[0]);
    assert!(rec.correlation_mean[0] > st.correlation_mean[0]);
    assert!(rec.mse_std.is_some());
    let w = report.innovation_whiteness.as_ref().unwrap();
    assert!(w.max_abs_autocorr <= w.threshold);
    assert_eq!(report.seeds.len(), 4);
}

#[test]
fn compare_multichannel_plot_columns() {
    let dir = tempfile::tempdir().unwrap();
    let config = ModelConfig {
        latent_dim: 2,
        ar_coeffs: vec![vec![0.5], vec![-0.3]],
        ma_coeffs: vec![vec![0.2], vec![0.4]],
        process_noise_vars: vec![1.0, 0.6],
        c: vec![vec![1.0, 0.3], vec![-0.4, 0.9], vec![0.5, 0.5]],
        meas_noise_var: 0.3,
    };
    let path = dir.path().join("two.json");
    config.to_file(&path).unwrap();
    let out = dir.path().join("report");
    let res = run(&[
        "compare",
        "--config",
        path.to_str().unwrap(),
        "--trials",
        "2",
        "--horizon",
        "200",
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{res:?}");
    let plot = std::fs::read_to_string(out.join("trial_001.csv")).unwrap();
    let header = plot.lines().nth(1).unwrap();
    assert_eq!(
        header,
        "k,x_true_1,x_true_2,xhat_recursive_1,xhat_recursive_2,xhat_static_1,xhat_static_2"
    );
    let report: pasfa::MetricsReport =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.methods[0].mse_mean.len(), 2);
}

#[test]
fn compare_rejects_zero_trials() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_demo_config(dir.path());
    let res = run(&[
        "compare",
        "--config",
        config.to_str().unwrap(),
        "--trials",
        "0",
        "--out",
        dir.path().join("r").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
}
