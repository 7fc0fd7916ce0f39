//! Data-generating model: latent vector ARMA dynamics observed through a
//! linear Gaussian map.
//!
//! The latent signal follows, per time step k,
//!
//! ```text
//! x[k] = A_1 x[k-1] + ... + A_L x[k-L] + e[k] + B_1 e[k-1] + ... + B_M e[k-M]
//! y[k] = C x[k] + eps[k]
//! ```
//!
//! with `e[k] ~ N(0, Sigma_e)`, `eps[k] ~ N(0, sigma_eps^2 I)` and all signals
//! zero at negative time instants. User-facing specifications carry per-channel
//! AR/MA coefficients (diagonal `A_l`, `B_l`); validation turns them into a
//! [`CheckedModel`] whose downstream math is written for general square
//! matrices, so diagonality is a property of validated inputs rather than an
//! assumption baked into the filter.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::error::Error;
use crate::linalg::{cholesky, max_ar_root_modulus};

/// Root moduli must stay strictly below this bound for a model to validate.
pub const STATIONARITY_TOLERANCE: f64 = 1.0 - 1e-10;

/// Relative truncation threshold for stationary covariance tail sums.
const STATIONARY_REL_TOL: f64 = 1e-14;
const STATIONARY_MAX_TERMS: usize = 1_000_000;

/// Latent ARMA dynamics: per-channel coefficients and process-noise variances.
///
/// `ar_coeffs[j]` and `ma_coeffs[j]` hold channel `j`'s coefficients ordered
/// by lag; every channel must carry the same number of lags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmaSpec {
    pub latent_dim: usize,
    pub ar_coeffs: Vec<Vec<f64>>,
    pub ma_coeffs: Vec<Vec<f64>>,
    pub process_noise_vars: Vec<f64>,
}

impl ArmaSpec {
    /// Single-channel convenience constructor.
    pub fn scalar(ar: &[f64], ma: &[f64], process_noise_var: f64) -> Self {
        ArmaSpec {
            latent_dim: 1,
            ar_coeffs: vec![ar.to_vec()],
            ma_coeffs: vec![ma.to_vec()],
            process_noise_vars: vec![process_noise_var],
        }
    }

    pub fn ar_order(&self) -> usize {
        self.ar_coeffs.first().map_or(0, Vec::len)
    }

    pub fn ma_order(&self) -> usize {
        self.ma_coeffs.first().map_or(0, Vec::len)
    }
}

/// Linear Gaussian observation map `y = C x + eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSpec {
    pub c: Vec<Vec<f64>>,
    pub meas_noise_var: f64,
}

impl ObservationSpec {
    pub fn scalar(c: f64, meas_noise_var: f64) -> Self {
        ObservationSpec {
            c: vec![vec![c]],
            meas_noise_var,
        }
    }

    pub fn obs_dim(&self) -> usize {
        self.c.len()
    }
}

/// On-disk model document: the JSON schema read by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub latent_dim: usize,
    pub ar_coeffs: Vec<Vec<f64>>,
    pub ma_coeffs: Vec<Vec<f64>>,
    pub process_noise_vars: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    pub meas_noise_var: f64,
}

impl ModelConfig {
    pub fn from_parts(arma: ArmaSpec, obs: ObservationSpec) -> Self {
        ModelConfig {
            latent_dim: arma.latent_dim,
            ar_coeffs: arma.ar_coeffs,
            ma_coeffs: arma.ma_coeffs,
            process_noise_vars: arma.process_noise_vars,
            c: obs.c,
            meas_noise_var: obs.meas_noise_var,
        }
    }

    pub fn into_parts(self) -> (ArmaSpec, ObservationSpec) {
        (
            ArmaSpec {
                latent_dim: self.latent_dim,
                ar_coeffs: self.ar_coeffs,
                ma_coeffs: self.ma_coeffs,
                process_noise_vars: self.process_noise_vars,
            },
            ObservationSpec {
                c: self.c,
                meas_noise_var: self.meas_noise_var,
            },
        )
    }

    pub fn from_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_file(&self, path: &Path) -> Result<(), Error> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Validates and returns an immutable model handle.
    pub fn validate(&self) -> Result<CheckedModel, Error> {
        let (arma, obs) = self.clone().into_parts();
        validate(&arma, &obs)
    }

    /// Hex SHA-256 of the canonical (whitespace-free) JSON serialization.
    ///
    /// Stable across reformatting of the config file; recorded in trajectory
    /// sidecars so estimates can be traced back to the generating model.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("model config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The bundled scalar ARMA(1,1) demo model used by the examples and the
    /// synthetic benchmark experiment.
    pub fn demo_scalar_arma11() -> Self {
        ModelConfig {
            latent_dim: 1,
            ar_coeffs: vec![vec![0.0935]],
            ma_coeffs: vec![vec![0.2416]],
            process_noise_vars: vec![0.7577],
            c: vec![vec![0.5253]],
            meas_noise_var: 0.2955,
        }
    }
}

/// A validated, immutable model handle.
///
/// Construction goes through [`validate`]; afterwards the handle is safe to
/// share across threads and all methods are pure.
#[derive(Debug, Clone)]
pub struct CheckedModel {
    ar: Vec<Array2<f64>>,
    ma: Vec<Array2<f64>>,
    sigma_e: Array2<f64>,
    c: Array2<f64>,
    meas_noise_var: f64,
    latent_dim: usize,
    obs_dim: usize,
}

/// Validates an [`ArmaSpec`]/[`ObservationSpec`] pair.
///
/// Checks coefficient-array shapes, strict positivity of every variance,
/// finiteness of all entries, and second-order stationarity of each latent
/// channel (max AR root modulus below [`STATIONARITY_TOLERANCE`], decided on
/// the channel's companion polynomial).
pub fn validate(arma: &ArmaSpec, obs: &ObservationSpec) -> Result<CheckedModel, Error> {
    let p = arma.latent_dim;
    if p == 0 {
        return Err(Error::DimensionMismatch {
            what: "latent_dim must be at least 1".into(),
        });
    }
    if arma.ar_coeffs.len() != p || arma.ma_coeffs.len() != p {
        return Err(Error::DimensionMismatch {
            what: format!(
                "expected {p} coefficient channels, got {} AR and {} MA",
                arma.ar_coeffs.len(),
                arma.ma_coeffs.len()
            ),
        });
    }
    if arma.process_noise_vars.len() != p {
        return Err(Error::DimensionMismatch {
            what: format!(
                "expected {p} process noise variances, got {}",
                arma.process_noise_vars.len()
            ),
        });
    }
    let l = arma.ar_order();
    let m = arma.ma_order();
    for (j, (ar, ma)) in arma.ar_coeffs.iter().zip(&arma.ma_coeffs).enumerate() {
        if ar.len() != l || ma.len() != m {
            return Err(Error::DimensionMismatch {
                what: format!("channel {j} has ragged coefficient arrays"),
            });
        }
        if ar.iter().chain(ma.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: format!("coefficients of channel {j}"),
            });
        }
    }
    for (j, &v) in arma.process_noise_vars.iter().enumerate() {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::NonPositiveVariance {
                name: format!("process_noise_vars[{j}]"),
            });
        }
    }
    for (j, ar) in arma.ar_coeffs.iter().enumerate() {
        let modulus = max_ar_root_modulus(ar);
        if modulus >= STATIONARITY_TOLERANCE {
            return Err(Error::NonStationary {
                channel: j,
                modulus,
            });
        }
    }

    let q = obs.c.len();
    if q == 0 {
        return Err(Error::DimensionMismatch {
            what: "observation matrix C has no rows".into(),
        });
    }
    let mut c = Array2::<f64>::zeros((q, p));
    for (i, row) in obs.c.iter().enumerate() {
        if row.len() != p {
            return Err(Error::DimensionMismatch {
                what: format!("C row {i} has {} entries, expected {p}", row.len()),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: format!("C[{i}][{j}]"),
                });
            }
            c[[i, j]] = v;
        }
    }
    if !obs.meas_noise_var.is_finite() || obs.meas_noise_var <= 0.0 {
        return Err(Error::NonPositiveVariance {
            name: "meas_noise_var".into(),
        });
    }

    let diag = |lag: usize, coeffs: &[Vec<f64>]| {
        Array2::from_shape_fn((p, p), |(r, s)| if r == s { coeffs[r][lag] } else { 0.0 })
    };
    let ar: Vec<Array2<f64>> = (0..l).map(|lag| diag(lag, &arma.ar_coeffs)).collect();
    let ma: Vec<Array2<f64>> = (0..m).map(|lag| diag(lag, &arma.ma_coeffs)).collect();
    let sigma_e = Array2::from_shape_fn((p, p), |(r, s)| {
        if r == s {
            arma.process_noise_vars[r]
        } else {
            0.0
        }
    });

    Ok(CheckedModel {
        ar,
        ma,
        sigma_e,
        c,
        meas_noise_var: obs.meas_noise_var,
        latent_dim: p,
        obs_dim: q,
    })
}

impl CheckedModel {
    /// Test-only door: builds a model from general (possibly non-diagonal)
    /// matrices, bypassing the stationarity check. The caller must supply a
    /// stable system; `sigma_e` must be symmetric positive definite.
    #[allow(dead_code)]
    pub(crate) fn from_matrices(
        ar: Vec<Array2<f64>>,
        ma: Vec<Array2<f64>>,
        sigma_e: Array2<f64>,
        c: Array2<f64>,
        meas_noise_var: f64,
    ) -> Result<Self, Error> {
        let p = sigma_e.nrows();
        if sigma_e.ncols() != p || p == 0 {
            return Err(Error::DimensionMismatch {
                what: "sigma_e must be square and nonempty".into(),
            });
        }
        for mat in ar.iter().chain(ma.iter()) {
            if mat.nrows() != p || mat.ncols() != p {
                return Err(Error::DimensionMismatch {
                    what: "AR/MA blocks must be latent_dim x latent_dim".into(),
                });
            }
        }
        if c.ncols() != p || c.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                what: "C must be obs_dim x latent_dim".into(),
            });
        }
        if cholesky(sigma_e.view()).is_none() {
            return Err(Error::NonPositiveVariance {
                name: "sigma_e".into(),
            });
        }
        if meas_noise_var <= 0.0 || !meas_noise_var.is_finite() {
            return Err(Error::NonPositiveVariance {
                name: "meas_noise_var".into(),
            });
        }
        let obs_dim = c.nrows();
        Ok(CheckedModel {
            ar,
            ma,
            sigma_e,
            c,
            meas_noise_var,
            latent_dim: p,
            obs_dim,
        })
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn ar_order(&self) -> usize {
        self.ar.len()
    }

    pub fn ma_order(&self) -> usize {
        self.ma.len()
    }

    /// Prediction window length `N = max(L, M + 1)`: the depth at which every
    /// MA noise term has zero conditional mean given the observations.
    pub fn window_len(&self) -> usize {
        self.ar.len().max(self.ma.len() + 1)
    }

    pub fn ar_blocks(&self) -> &[Array2<f64>] {
        &self.ar
    }

    pub fn ma_blocks(&self) -> &[Array2<f64>] {
        &self.ma
    }

    pub fn sigma_e(&self) -> ArrayView2<'_, f64> {
        self.sigma_e.view()
    }

    pub fn observation_matrix(&self) -> ArrayView2<'_, f64> {
        self.c.view()
    }

    pub fn meas_noise_var(&self) -> f64 {
        self.meas_noise_var
    }

    /// Impulse-response matrices `h[0..=j_max]` of the latent dynamics.
    ///
    /// `h[0] = I` and `h[j] = sum_i A_i h[j-i] + B_j` (with `B_j = 0` past the
    /// MA order), so that `x[k] = sum_j h[j] e[k-j]` under zero initial
    /// conditions.
    pub fn impulse_response(&self, j_max: usize) -> Vec<Array2<f64>> {
        let p = self.latent_dim;
        let mut h = Vec::with_capacity(j_max + 1);
        h.push(Array2::eye(p));
        for j in 1..=j_max {
            let mut hj = if j <= self.ma.len() {
                self.ma[j - 1].clone()
            } else {
                Array2::zeros((p, p))
            };
            for (i, a) in self.ar.iter().enumerate() {
                let lag = i + 1;
                if lag <= j {
                    hj = hj + a.dot(&h[j - lag]);
                }
            }
            h.push(hj);
        }
        h
    }

    /// Cross-covariance `gamma_ex[l] = E(e[k] x[k-l]^T)`.
    ///
    /// Zero for `l >= 1` (noise is independent of past states); for `l <= 0`
    /// equals `Sigma_e h[-l]^T`, which for diagonal models coincides with
    /// `Sigma_e h[-l]`.
    pub fn cross_cov_ex(&self, lag: i64) -> Array2<f64> {
        let p = self.latent_dim;
        if lag >= 1 {
            return Array2::zeros((p, p));
        }
        let d = (-lag) as usize;
        let h = self.impulse_response(d);
        self.sigma_e.dot(&h[d].t())
    }

    /// Transient second moment `E[x[k] x[k-l]^T]` under zero initial
    /// conditions: the finite sum `sum_{u=0..k-l} h[u+l] Sigma_e h[u]^T`.
    pub fn prior_cov(&self, k: usize, lag: usize) -> Result<Array2<f64>, Error> {
        if lag > k {
            return Err(Error::InvalidLag { lag, time: k });
        }
        let h = self.impulse_response(k);
        let p = self.latent_dim;
        let mut acc = Array2::<f64>::zeros((p, p));
        for u in 0..=(k - lag) {
            acc = acc + h[u + lag].dot(&self.sigma_e).dot(&h[u].t());
        }
        Ok(acc)
    }

    /// Stationary covariance `lim_{k->inf} E[x[k] x[k-l]^T]`, computed by
    /// truncated impulse-response summation (terms dropped once their relative
    /// contribution falls below 1e-14).
    pub fn stationary_cov(&self, lag: usize) -> Array2<f64> {
        let p = self.latent_dim;
        let l = self.ar.len();
        let m = self.ma.len();
        // Sliding window over impulse responses: step u needs h[u + lag] (the
        // newest entry) plus h[u] and, for the recursion, h[j-1..j-L].
        let keep = l.max(lag) + 1;
        let mut window: std::collections::VecDeque<Array2<f64>> = std::collections::VecDeque::new();
        let mut acc = Array2::<f64>::zeros((p, p));
        let mut j = 0usize; // next impulse-response index to produce
        for u in 0..STATIONARY_MAX_TERMS {
            while j <= u + lag {
                let hj = if j == 0 {
                    Array2::eye(p)
                } else {
                    let mut hj = if j <= m {
                        self.ma[j - 1].clone()
                    } else {
                        Array2::zeros((p, p))
                    };
                    for (i, a) in self.ar.iter().enumerate() {
                        let lg = i + 1;
                        if lg <= j && lg <= window.len() {
                            hj = hj + a.dot(&window[window.len() - lg]);
                        }
                    }
                    hj
                };
                window.push_back(hj);
                if window.len() > keep {
                    window.pop_front();
                }
                j += 1;
            }
            // window holds indices (j - window.len())..j; translate u and u+lag.
            let base = j - window.len();
            let h_new = &window[u + lag - base];
            let h_old = &window[u - base];
            let term = h_new.dot(&self.sigma_e).dot(&h_old.t());
            let term_norm = term.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            acc += &term;
            let acc_norm = acc.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if u > l + m && term_norm <= STATIONARY_REL_TOL * acc_norm.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        acc
    }
}
