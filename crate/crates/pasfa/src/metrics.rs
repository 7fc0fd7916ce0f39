//! Evaluation metrics and multi-trial summaries.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Per-channel mean squared error between two equally shaped sequences.
pub fn mse(truth: ArrayView2<'_, f64>, est: ArrayView2<'_, f64>) -> Result<Vec<f64>, Error> {
    if truth.shape() != est.shape() || truth.nrows() == 0 {
        return Err(Error::ShapeMismatch {
            what: format!("mse inputs {:?} vs {:?}", truth.shape(), est.shape()),
        });
    }
    let t = truth.nrows() as f64;
    let d = truth.ncols();
    let mut out = vec![0.0; d];
    for (trow, erow) in truth.rows().into_iter().zip(est.rows()) {
        for j in 0..d {
            let diff = trow[j] - erow[j];
            out[j] += diff * diff;
        }
    }
    for v in &mut out {
        *v /= t;
    }
    Ok(out)
}

/// Per-channel sample Pearson correlation.
///
/// Needs at least two rows and nonzero variance in both inputs per channel.
pub fn pearson(truth: ArrayView2<'_, f64>, est: ArrayView2<'_, f64>) -> Result<Vec<f64>, Error> {
    if truth.shape() != est.shape() || truth.nrows() < 2 {
        return Err(Error::ShapeMismatch {
            what: format!(
                "pearson inputs {:?} vs {:?} (need >= 2 rows)",
                truth.shape(),
                est.shape()
            ),
        });
    }
    let t = truth.nrows() as f64;
    let d = truth.ncols();
    let mut out = Vec::with_capacity(d);
    for j in 0..d {
        let a = truth.column(j);
        let b = est.column(j);
        let (ma, mb) = (a.sum() / t, b.sum() / t);
        let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
        for (&x, &y) in a.iter().zip(b.iter()) {
            let (dx, dy) = (x - ma, y - mb);
            saa += dx * dx;
            sbb += dy * dy;
            sab += dx * dy;
        }
        if saa <= 0.0 || sbb <= 0.0 {
            return Err(Error::DegenerateVariance { channel: j });
        }
        out.push((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0));
    }
    Ok(out)
}

/// Normalized sample autocorrelation of a scalar series at lags `1..=max_lag`.
pub fn sample_autocorr(series: &[f64], max_lag: usize) -> Vec<f64> {
    let t = series.len();
    let mean = series.iter().sum::<f64>() / t as f64;
    let var: f64 = series.iter().map(|v| (v - mean) * (v - mean)).sum();
    let mut out = Vec::with_capacity(max_lag);
    for lag in 1..=max_lag {
        if lag >= t || var <= 0.0 {
            out.push(0.0);
            continue;
        }
        let mut acc = 0.0;
        for k in lag..t {
            acc += (series[k] - mean) * (series[k - lag] - mean);
        }
        out.push(acc / var);
    }
    out
}

/// One method's metrics on one trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodMetrics {
    pub method: String,
    /// Per-channel MSE.
    pub mse: Vec<f64>,
    /// Per-channel Pearson correlation.
    pub correlation: Vec<f64>,
}

/// All methods' metrics on one trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub seed: u64,
    pub methods: Vec<MethodMetrics>,
}

/// Mean and (for two or more trials) sample standard deviation per metric.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub mse_mean: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mse_std: Option<Vec<f64>>,
    pub correlation_mean: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation_std: Option<Vec<f64>>,
}

/// Innovation whiteness diagnostics pooled over trials and channels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WhitenessStats {
    pub lags: Vec<usize>,
    /// Acceptance threshold `4 / sqrt(T)` on each autocorrelation.
    pub threshold: f64,
    /// Largest absolute autocorrelation seen at any lag in any trial.
    pub max_abs_autocorr: f64,
    /// Mean absolute autocorrelation per lag.
    pub mean_abs_by_lag: Vec<f64>,
}

/// Multi-trial evaluation report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub trials: usize,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub methods: Vec<MethodSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub innovation_whiteness: Option<WhitenessStats>,
}

fn mean_and_std(samples: &[Vec<f64>]) -> (Vec<f64>, Option<Vec<f64>>) {
    let n = samples.len();
    let d = samples[0].len();
    let mut mean = vec![0.0; d];
    for s in samples {
        for j in 0..d {
            mean[j] += s[j];
        }
    }
    for v in &mut mean {
        *v /= n as f64;
    }
    if n < 2 {
        return (mean, None);
    }
    let mut var = vec![0.0; d];
    for s in samples {
        for j in 0..d {
            let diff = s[j] - mean[j];
            var[j] += diff * diff;
        }
    }
    let std = var.into_iter().map(|v| (v / (n - 1) as f64).sqrt()).collect();
    (mean, Some(std))
}

/// Aggregates per-trial metrics into per-method means and standard
/// deviations. Standard deviations are omitted for a single trial.
pub fn trial_summary(trials: &[TrialMetrics], horizon: usize) -> MetricsReport {
    assert!(!trials.is_empty(), "at least one trial required");
    let method_names: Vec<String> = trials[0].methods.iter().map(|m| m.method.clone()).collect();
    let mut methods = Vec::with_capacity(method_names.len());
    for name in &method_names {
        let mse_samples: Vec<Vec<f64>> = trials
            .iter()
            .map(|t| {
                t.methods
                    .iter()
                    .find(|m| &m.method == name)
                    .expect("every trial reports every method")
                    .mse
                    .clone()
            })
            .collect();
        let corr_samples: Vec<Vec<f64>> = trials
            .iter()
            .map(|t| {
                t.methods
                    .iter()
                    .find(|m| &m.method == name)
                    .unwrap()
                    .correlation
                    .clone()
            })
            .collect();
        let (mse_mean, mse_std) = mean_and_std(&mse_samples);
        let (correlation_mean, correlation_std) = mean_and_std(&corr_samples);
        methods.push(MethodSummary {
            method: name.clone(),
            mse_mean,
            mse_std,
            correlation_mean,
            correlation_std,
        });
    }
    MetricsReport {
        trials: trials.len(),
        horizon,
        seeds: trials.iter().map(|t| t.seed).collect(),
        methods,
        innovation_whiteness: None,
    }
}

fn channel_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

impl MetricsReport {
    /// Plain-text table: one row per method, mean with the standard deviation
    /// in brackets. Multi-channel metrics are averaged across channels here;
    /// the JSON report keeps the per-channel detail.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "Evaluation over {} independent seeded trial(s), horizon {}\n",
            self.trials, self.horizon
        ));
        out.push_str(&format!(
            "{:<28}  {:<20}  {:<20}\n",
            "Method", "MSE", "Correlation Coefficient"
        ));
        for m in &self.methods {
            let fmt = |mean: &[f64], std: &Option<Vec<f64>>| match std {
                Some(s) => format!(
                    "{:.4} (± {:.4})",
                    channel_mean(mean),
                    channel_mean(s)
                ),
                None => format!("{:.4}", channel_mean(mean)),
            };
            out.push_str(&format!(
                "{:<28}  {:<20}  {:<20}\n",
                m.method,
                fmt(&m.mse_mean, &m.mse_std),
                fmt(&m.correlation_mean, &m.correlation_std)
            ));
        }
        if let Some(w) = &self.innovation_whiteness {
            out.push_str(&format!(
                "Innovation whiteness: max |autocorr| {:.4} at lags {:?} (threshold {:.4})\n",
                w.max_abs_autocorr, w.lags, w.threshold
            ));
        }
        out
    }
}
