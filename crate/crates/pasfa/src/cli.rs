//! Command implementations behind the `pasfa` binary.
//!
//! Outputs are deterministic functions of the flags: noise comes from
//! counter-based streams and per-trial work is keyed by `(master seed, trial
//! index)`, so results are byte-identical across runs and parallelism levels.
//! The only wall-clock value ever written is the labeled timestamp in
//! trajectory sidecars.

use ndarray::Array2;
use rayon::prelude::*;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::filter;
use crate::metrics::{
    self, sample_autocorr, MethodMetrics, MetricsReport, TrialMetrics, WhitenessStats,
};
use crate::model::{CheckedModel, ModelConfig};
use crate::oracles;
use crate::rng::trial_seed;
use crate::simulate::{simulate, Trajectory, TrajectorySidecar};

/// Estimation method selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    /// Sliding-window recursive MMSE filter.
    Recursive,
    /// Kalman filter on the augmented state space.
    AugmentedKalman,
    /// Dynamics-free stationary posterior (stand-in baseline).
    Static,
    /// Exact batch conditional mean (capped horizon).
    BatchOracle,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Recursive => "recursive",
            Method::AugmentedKalman => "augmented-kalman",
            Method::Static => "static",
            Method::BatchOracle => "batch-oracle",
        }
    }
}

fn load_model(config: &Path) -> Result<(ModelConfig, CheckedModel), Error> {
    let config = ModelConfig::from_file(config)?;
    let model = config.validate()?;
    Ok((config, model))
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Sidecar path for a trajectory CSV: `<out>.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// `simulate`: draw a trajectory and write the CSV plus its JSON sidecar.
pub fn cmd_simulate(config: &Path, horizon: usize, seed: u64, out: &Path) -> Result<(), Error> {
    let (config, model) = load_model(config)?;
    let traj = simulate(&model, horizon, seed)?;
    traj.write_csv_file(out)?;
    let sidecar = TrajectorySidecar {
        seed,
        horizon,
        model_hash: config.content_hash(),
        generated_at_unix: unix_now(),
    };
    let mut text = serde_json::to_string_pretty(&sidecar)?;
    text.push('\n');
    std::fs::write(sidecar_path(out), text)?;
    Ok(())
}

fn check_dims(model: &CheckedModel, traj: &Trajectory) -> Result<(), Error> {
    if traj.y.ncols() != model.obs_dim() || traj.x.ncols() != model.latent_dim() {
        return Err(Error::DimensionMismatch {
            what: format!(
                "trajectory has {} latent / {} observed columns, model expects {} / {}",
                traj.x.ncols(),
                traj.y.ncols(),
                model.latent_dim(),
                model.obs_dim()
            ),
        });
    }
    Ok(())
}

fn write_estimates_csv(
    out: &Path,
    estimates: &Array2<f64>,
    innovations: Option<&Array2<f64>>,
    posterior_trace: Option<&[f64]>,
) -> Result<(), Error> {
    let file = std::fs::File::create(out)?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let p = estimates.ncols();
    let mut header: Vec<String> = vec!["k".into()];
    header.extend((1..=p).map(|j| format!("xhat_{j}")));
    if let Some(nu) = innovations {
        header.extend((1..=nu.ncols()).map(|j| format!("nu_{j}")));
    }
    if posterior_trace.is_some() {
        header.push("p_post_trace".into());
    }
    w.write_record(&header)?;
    for k in 0..estimates.nrows() {
        let mut record = vec![k.to_string()];
        record.extend((0..p).map(|j| estimates[[k, j]].to_string()));
        if let Some(nu) = innovations {
            record.extend((0..nu.ncols()).map(|j| nu[[k, j]].to_string()));
        }
        if let Some(tr) = posterior_trace {
            record.push(tr[k].to_string());
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// `filter`: run one estimation method over a trajectory CSV.
pub fn cmd_filter(
    config: &Path,
    trajectory: &Path,
    method: Method,
    out: &Path,
) -> Result<(), Error> {
    let (_, model) = load_model(config)?;
    let traj = Trajectory::read_csv_file(trajectory)?;
    check_dims(&model, &traj)?;
    match method {
        Method::Recursive => {
            let outputs = filter::run(&model, traj.y.view())?;
            let p = model.latent_dim();
            let q = model.obs_dim();
            let mut estimates = Array2::<f64>::zeros((outputs.len(), p));
            let mut innovations = Array2::<f64>::zeros((outputs.len(), q));
            let mut trace = Vec::with_capacity(outputs.len());
            for (k, step) in outputs.iter().enumerate() {
                for j in 0..p {
                    estimates[[k, j]] = step.filtered[j];
                }
                for j in 0..q {
                    innovations[[k, j]] = step.innovation[j];
                }
                trace.push((0..p).map(|j| step.posterior_cov[[j, j]]).sum());
            }
            write_estimates_csv(out, &estimates, Some(&innovations), Some(&trace))
        }
        Method::AugmentedKalman => {
            let run = oracles::augmented_kalman(&model, traj.y.view())?;
            write_estimates_csv(
                out,
                &run.estimates,
                Some(&run.innovations),
                Some(&run.posterior_trace),
            )
        }
        Method::Static => {
            let estimates = oracles::static_posterior(&model, traj.y.view());
            write_estimates_csv(out, &estimates, None, None)
        }
        Method::BatchOracle => {
            let estimates = oracles::batch_filtered_mmse(&model, traj.y.view())?;
            write_estimates_csv(out, &estimates, None, None)
        }
    }
}

/// Everything `compare` computes for one trial.
struct TrialRun {
    seed: u64,
    traj: Trajectory,
    recursive: Array2<f64>,
    statics: Array2<f64>,
    metrics: TrialMetrics,
    /// Innovation autocorrelations, per channel, lags 1..=5.
    innovation_autocorr: Vec<Vec<f64>>,
}

const WHITENESS_LAGS: usize = 5;

fn run_trial(model: &CheckedModel, horizon: usize, seed: u64) -> Result<TrialRun, Error> {
    let traj = simulate(model, horizon, seed)?;
    let outputs = filter::run(model, traj.y.view())?;
    let p = model.latent_dim();
    let q = model.obs_dim();
    let mut recursive = Array2::<f64>::zeros((horizon, p));
    let mut innovations = Array2::<f64>::zeros((horizon, q));
    for (k, step) in outputs.iter().enumerate() {
        for j in 0..p {
            recursive[[k, j]] = step.filtered[j];
        }
        for j in 0..q {
            innovations[[k, j]] = step.innovation[j];
        }
    }
    let statics = oracles::static_posterior(model, traj.y.view());
    let augmented = oracles::augmented_kalman(model, traj.y.view())?.estimates;

    let mut methods = Vec::new();
    for (name, est) in [
        ("recursive", &recursive),
        ("static", &statics),
        ("augmented-kalman", &augmented),
    ] {
        methods.push(MethodMetrics {
            method: name.into(),
            mse: metrics::mse(traj.x.view(), est.view())?,
            correlation: metrics::pearson(traj.x.view(), est.view())?,
        });
    }
    let innovation_autocorr = (0..q)
        .map(|j| {
            let col: Vec<f64> = innovations.column(j).to_vec();
            sample_autocorr(&col, WHITENESS_LAGS)
        })
        .collect();
    Ok(TrialRun {
        seed,
        traj,
        recursive,
        statics,
        metrics: TrialMetrics {
            seed,
            methods,
        },
        innovation_autocorr,
    })
}

fn write_trial_plot_csv(dir: &Path, index: usize, trial: &TrialRun) -> Result<(), Error> {
    let path = dir.join(format!("trial_{index:03}.csv"));
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    let corr = |name: &str| {
        trial
            .metrics
            .methods
            .iter()
            .find(|m| m.method == name)
            .map(|m| {
                m.correlation
                    .iter()
                    .map(|v| format!("{v:.4}"))
                    .collect::<Vec<_>>()
                    .join("/")
            })
            .unwrap_or_default()
    };
    writeln!(
        out,
        "# seed={} correlation: recursive={} static={}",
        trial.seed,
        corr("recursive"),
        corr("static")
    )?;
    let p = trial.traj.x.ncols();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = vec!["k".into()];
    header.extend((1..=p).map(|j| format!("x_true_{j}")));
    header.extend((1..=p).map(|j| format!("xhat_recursive_{j}")));
    header.extend((1..=p).map(|j| format!("xhat_static_{j}")));
    w.write_record(&header)?;
    for k in 0..trial.traj.horizon {
        let mut record = vec![k.to_string()];
        record.extend((0..p).map(|j| trial.traj.x[[k, j]].to_string()));
        record.extend((0..p).map(|j| trial.recursive[[k, j]].to_string()));
        record.extend((0..p).map(|j| trial.statics[[k, j]].to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// `compare`: run seeded trials of every method, write the Table-style report
/// (JSON and aligned text) plus per-trial plot CSVs.
pub fn cmd_compare(
    config: &Path,
    trials: usize,
    horizon: usize,
    master_seed: u64,
    out_dir: &Path,
) -> Result<(), Error> {
    if trials == 0 {
        return Err(Error::Parse("trials must be at least 1".into()));
    }
    if horizon == 0 {
        return Err(Error::EmptyHorizon);
    }
    let (_, model) = load_model(config)?;
    std::fs::create_dir_all(out_dir)?;

    let runs: Vec<Result<TrialRun, Error>> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(&model, horizon, trial_seed(master_seed, i as u64)))
        .collect();
    let mut trial_runs = Vec::with_capacity(trials);
    for run in runs {
        trial_runs.push(run?);
    }

    let per_trial: Vec<TrialMetrics> = trial_runs.iter().map(|t| t.metrics.clone()).collect();
    let mut report: MetricsReport = metrics::trial_summary(&per_trial, horizon);
    let threshold = 4.0 / (horizon as f64).sqrt();
    let mut max_abs = 0.0f64;
    let mut mean_abs = vec![0.0f64; WHITENESS_LAGS];
    let mut count = 0usize;
    for t in &trial_runs {
        for channel in &t.innovation_autocorr {
            count += 1;
            for (lag_idx, rho) in channel.iter().enumerate() {
                max_abs = max_abs.max(rho.abs());
                mean_abs[lag_idx] += rho.abs();
            }
        }
    }
    for v in &mut mean_abs {
        *v /= count.max(1) as f64;
    }
    report.innovation_whiteness = Some(WhitenessStats {
        lags: (1..=WHITENESS_LAGS).collect(),
        threshold,
        max_abs_autocorr: max_abs,
        mean_abs_by_lag: mean_abs,
    });

    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    std::fs::write(out_dir.join("report.json"), json)?;
    std::fs::write(out_dir.join("report.txt"), report.render_table())?;
    for (i, trial) in trial_runs.iter().enumerate() {
        write_trial_plot_csv(out_dir, i, trial)?;
    }
    Ok(())
}
