//! Recursive MMSE estimation of the latent states without state-space
//! augmentation.
//!
//! The filter keeps a sliding window over the `N = max(L, M + 1)` most recent
//! target times together with the full block matrix of their joint error
//! covariances. Each observation triggers three phases:
//!
//! 1. EXTEND — a new target enters the window. At depth `N` every MA noise
//!    term has zero conditional mean, so the predicted estimate is the pure AR
//!    combination of windowed estimates; new covariance blocks come from the
//!    cross-covariance recursion and the full second-moment expansion of the
//!    difference equation (both fed by `gamma_ex`).
//! 2. INNOVATE — one joint Gaussian conditioning step updates every windowed
//!    estimate and every covariance block with the new observation.
//! 3. RETIRE — the current time's posterior quantities are emitted and the
//!    oldest block row/column is dropped once no future EXTEND references it.
//!
//! Startup needs no special casing beyond initializing the window with the
//! exact transient (zero-initial-condition) prior moments: the first window is
//! what EXTEND would have produced had observations existed before time zero.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::Error;
use crate::linalg::{cholesky, symmetrize};
use crate::model::CheckedModel;

/// Per-step filter output at time `k`.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub time: usize,
    /// Filtered estimate `xhat[k|k]`.
    pub filtered: Array1<f64>,
    /// Innovation `y[k] - C xhat[k|k-1]`.
    pub innovation: Array1<f64>,
    /// Innovation covariance `S[k] = C P[k|k-1] C^T + sigma_eps^2 I`.
    pub innovation_cov: Array2<f64>,
    /// Posterior covariance `P[k|k]`.
    pub posterior_cov: Array2<f64>,
    /// Lag-zero filter gain `F[k, k]`.
    pub gain: Array2<f64>,
}

/// Sequential filter over one observation stream.
///
/// `step` calls must be strictly ordered; distinct filters over distinct
/// streams are independent and may run concurrently.
#[derive(Debug, Clone)]
pub struct Filter<'m> {
    model: &'m CheckedModel,
    next_time: usize,
    /// Retained target times, ascending and contiguous.
    targets: Vec<usize>,
    /// Estimates `xhat[target | next_time - 1]`, aligned with `targets`.
    estimates: Vec<Array1<f64>>,
    /// Block matrix of error covariances `P[i, j | next_time - 1]`; block
    /// `(i, j)` sits at rows `i*p..(i+1)*p`, columns likewise.
    cov: Array2<f64>,
    /// `gamma_ex[-d] = Sigma_e h[d]^T` for `d = 0..=M`.
    gamma_neg: Vec<Array2<f64>>,
}

impl<'m> Filter<'m> {
    /// Initializes the window `{0, .., N-1}` with zero-mean estimates and the
    /// exact transient prior covariances (all signals zero before time zero).
    pub fn new(model: &'m CheckedModel) -> Self {
        let p = model.latent_dim();
        let n = model.window_len();
        let m = model.ma_order();
        let targets: Vec<usize> = (0..n).collect();
        let estimates = vec![Array1::zeros(p); n];
        let mut cov = Array2::<f64>::zeros((n * p, n * p));
        for i in 0..n {
            for j in 0..=i {
                let block = model
                    .prior_cov(i, i - j)
                    .expect("lag bounded by time index");
                for r in 0..p {
                    for s in 0..p {
                        cov[[i * p + r, j * p + s]] = block[[r, s]];
                        cov[[j * p + s, i * p + r]] = block[[r, s]];
                    }
                }
            }
        }
        let h = model.impulse_response(m);
        let gamma_neg = (0..=m)
            .map(|d| model.sigma_e().dot(&h[d].t()))
            .collect();
        Filter {
            model,
            next_time: 0,
            targets,
            estimates,
            cov,
            gamma_neg,
        }
    }

    /// Time of the next observation this filter expects.
    pub fn next_time(&self) -> usize {
        self.next_time
    }

    /// Currently retained target times.
    pub fn window_targets(&self) -> &[usize] {
        &self.targets
    }

    /// Block error-covariance matrix over the retained targets.
    pub fn block_cov(&self) -> ArrayView2<'_, f64> {
        self.cov.view()
    }

    /// Current estimate of `x[target]` given all processed observations.
    pub fn estimate(&self, target: usize) -> Option<ArrayView1<'_, f64>> {
        let pos = self.position(target)?;
        Some(self.estimates[pos].view())
    }

    fn position(&self, target: usize) -> Option<usize> {
        let first = *self.targets.first()?;
        if target < first || target > *self.targets.last()? {
            return None;
        }
        Some(target - first)
    }

    fn block(&self, i: usize, j: usize) -> Array2<f64> {
        let p = self.model.latent_dim();
        self.cov
            .slice(ndarray::s![i * p..(i + 1) * p, j * p..(j + 1) * p])
            .to_owned()
    }

    /// `gamma_ex[d]` restricted to the lags EXTEND needs; zero for `d >= 1`.
    fn gamma(&self, d: i64) -> Option<&Array2<f64>> {
        if d >= 1 {
            None
        } else {
            self.gamma_neg.get((-d) as usize)
        }
    }

    /// Appends target `k + N - 1`, conditioned on observations through `k-1`.
    fn extend(&mut self) {
        let model = self.model;
        let p = model.latent_dim();
        let n = model.window_len();
        let l = model.ar_order();
        let m = model.ma_order();
        let k = self.next_time;
        let kstar = k + n - 1;
        let first = self.targets[0];
        let w = self.targets.len();
        let wp = w * p;
        let dim = wp + p;

        let ar: Vec<&[f64]> = model
            .ar_blocks()
            .iter()
            .map(|a| a.as_slice().expect("standard layout"))
            .collect();
        let ma: Vec<&[f64]> = model
            .ma_blocks()
            .iter()
            .map(|b| b.as_slice().expect("standard layout"))
            .collect();
        let sig = model.sigma_e().to_owned();
        let sig = sig.as_slice().expect("standard layout");

        // Predicted estimate: pure AR combination (MA terms are mean-zero at
        // conditioning depth N).
        let mut xhat_new = Array1::<f64>::zeros(p);
        for (i, a) in ar.iter().enumerate() {
            let est = &self.estimates[kstar - (i + 1) - first];
            for r in 0..p {
                let mut acc = 0.0;
                for cc in 0..p {
                    acc += a[r * p + cc] * est[cc];
                }
                xhat_new[r] += acc;
            }
        }

        let mut cov_new = Array2::<f64>::zeros((dim, dim));
        {
            let old = self.cov.as_slice().expect("standard layout");
            let new = cov_new.as_slice_mut().expect("standard layout");
            for r in 0..wp {
                new[r * dim..r * dim + wp].copy_from_slice(&old[r * wp..r * wp + wp]);
            }

            // Cross blocks P[kstar, j] for every retained j, written into the
            // appended row (and mirrored below).
            for (jpos, &j) in self.targets.iter().enumerate() {
                for (i, a) in ar.iter().enumerate() {
                    let row = (kstar - (i + 1) - first) * p;
                    for r in 0..p {
                        for s in 0..p {
                            let mut acc = 0.0;
                            for cc in 0..p {
                                acc += a[r * p + cc] * old[(row + cc) * wp + jpos * p + s];
                            }
                            new[(wp + r) * dim + jpos * p + s] += acc;
                        }
                    }
                }
                // Noise term: sum_{j2=0..M} B_{j2} gamma_ex[kstar - j2 - j],
                // with B_0 = I.
                for j2 in 0..=m {
                    let d = kstar as i64 - j2 as i64 - j as i64;
                    if let Some(g) = self.gamma(d) {
                        let g = g.as_slice().expect("standard layout");
                        if j2 == 0 {
                            for r in 0..p {
                                for s in 0..p {
                                    new[(wp + r) * dim + jpos * p + s] += g[r * p + s];
                                }
                            }
                        } else {
                            let b = ma[j2 - 1];
                            for r in 0..p {
                                for s in 0..p {
                                    let mut acc = 0.0;
                                    for cc in 0..p {
                                        acc += b[r * p + cc] * g[cc * p + s];
                                    }
                                    new[(wp + r) * dim + jpos * p + s] += acc;
                                }
                            }
                        }
                    }
                }
            }

            // Diagonal block: full second-moment expansion of the difference
            // equation, including the cross-lag terms absent from the same-lag
            // shorthand (they vanish only for L = 1).
            let mut diag = vec![0.0f64; p * p];
            diag.copy_from_slice(sig);
            for b in &ma {
                // diag += B Sigma_e B^T
                for r in 0..p {
                    for s in 0..p {
                        let mut acc = 0.0;
                        for c1 in 0..p {
                            let brc1 = b[r * p + c1];
                            for c2 in 0..p {
                                acc += brc1 * sig[c1 * p + c2] * b[s * p + c2];
                            }
                        }
                        diag[r * p + s] += acc;
                    }
                }
            }
            for i in 1..=l {
                let a_i = ar[i - 1];
                let row = (kstar - i - first) * p;
                for i2 in 1..=l {
                    let a_i2 = ar[i2 - 1];
                    let col = (kstar - i2 - first) * p;
                    // diag += A_i P[row, col] A_i2^T
                    for r in 0..p {
                        for s in 0..p {
                            let mut acc = 0.0;
                            for c1 in 0..p {
                                let arc1 = a_i[r * p + c1];
                                for c2 in 0..p {
                                    acc += arc1 * old[(row + c1) * wp + col + c2] * a_i2[s * p + c2];
                                }
                            }
                            diag[r * p + s] += acc;
                        }
                    }
                }
                for j2 in 1..=m {
                    if let Some(g) = self.gamma(i as i64 - j2 as i64) {
                        let g = g.as_slice().expect("standard layout");
                        let b_j2 = ma[j2 - 1];
                        // term = A_i gamma^T B_j2^T, added with its transpose
                        for r in 0..p {
                            for s in 0..p {
                                let mut acc = 0.0;
                                for c1 in 0..p {
                                    let arc1 = a_i[r * p + c1];
                                    for c2 in 0..p {
                                        acc += arc1 * g[c2 * p + c1] * b_j2[s * p + c2];
                                    }
                                }
                                diag[r * p + s] += acc;
                                diag[s * p + r] += acc;
                            }
                        }
                    }
                }
            }
            for r in 0..p {
                for s in 0..p {
                    new[(wp + r) * dim + wp + s] = diag[r * p + s];
                }
            }
            // Mirror the appended row into the appended column.
            for r in 0..p {
                for col in 0..wp {
                    new[col * dim + wp + r] = new[(wp + r) * dim + col];
                }
            }
        }
        self.cov = cov_new;
        self.targets.push(kstar);
        self.estimates.push(xhat_new);
    }

    /// Processes the observation at the next time index.
    pub fn step(&mut self, y: ArrayView1<'_, f64>) -> Result<StepOutput, Error> {
        let model = self.model;
        let p = model.latent_dim();
        let q = model.obs_dim();
        if y.len() != q {
            return Err(Error::DimensionMismatch {
                what: format!("observation has {} entries, expected {q}", y.len()),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: format!("observation at time {}", self.next_time),
            });
        }

        let k = self.next_time;
        if k > 0 {
            self.extend();
        }
        let w = self.targets.len();
        let first = self.targets[0];
        let pos_k = k - first;
        let c = model.observation_matrix();

        // Innovation and its covariance.
        let p_kk = self.block(pos_k, pos_k);
        let mut s = c.dot(&p_kk).dot(&c.t());
        for i in 0..q {
            s[[i, i]] += model.meas_noise_var();
        }
        let chol = cholesky(s.view()).ok_or(Error::SingularInnovationCovariance)?;
        let innovation = &y - &c.dot(&self.estimates[pos_k]);

        // u[j] = P[j,k] C^T stacked as a (w p) x q matrix; gains F[j,k] =
        // u[j] S^{-1} solved in one forward/back pass per row.
        let total = w * p;
        let mut u = vec![0.0f64; total * q];
        let mut gains = vec![0.0f64; total * q];
        {
            let cov = self.cov.as_slice().expect("standard layout");
            let c_flat = c.to_owned();
            let c_flat = c_flat.as_slice().expect("standard layout");
            let chol = chol.as_slice().expect("standard layout");
            for row in 0..total {
                let cov_row = &cov[row * total + pos_k * p..row * total + (pos_k + 1) * p];
                for t in 0..q {
                    let mut acc = 0.0;
                    for cc in 0..p {
                        acc += cov_row[cc] * c_flat[t * p + cc];
                    }
                    u[row * q + t] = acc;
                }
                // Solve S g = u_row (S symmetric, chol = lower factor).
                let g_row = &mut gains[row * q..(row + 1) * q];
                g_row.copy_from_slice(&u[row * q..(row + 1) * q]);
                for i in 0..q {
                    for mcol in 0..i {
                        g_row[i] -= chol[i * q + mcol] * g_row[mcol];
                    }
                    g_row[i] /= chol[i * q + i];
                }
                for i in (0..q).rev() {
                    for mcol in (i + 1)..q {
                        g_row[i] -= chol[mcol * q + i] * g_row[mcol];
                    }
                    g_row[i] /= chol[i * q + i];
                }
            }
        }

        // Estimate and covariance updates (optimal-gain form):
        // xhat[j] += F[j,k] nu;  P[i,j] -= F[i,k] u[j]^T.
        for jpos in 0..w {
            for r in 0..p {
                let mut acc = 0.0;
                for t in 0..q {
                    acc += gains[(jpos * p + r) * q + t] * innovation[t];
                }
                self.estimates[jpos][r] += acc;
            }
        }
        {
            let cov = self.cov.as_slice_mut().expect("standard layout");
            for row in 0..total {
                let g_row = &gains[row * q..(row + 1) * q];
                let cov_row = &mut cov[row * total..(row + 1) * total];
                for col in 0..total {
                    let u_col = &u[col * q..(col + 1) * q];
                    let mut acc = 0.0;
                    for t in 0..q {
                        acc += g_row[t] * u_col[t];
                    }
                    cov_row[col] -= acc;
                }
            }
        }
        symmetrize(&mut self.cov);

        let output = StepOutput {
            time: k,
            filtered: self.estimates[pos_k].clone(),
            innovation,
            innovation_cov: s,
            posterior_cov: self.block(pos_k, pos_k),
            gain: Array2::from_shape_fn((p, q), |(r, t)| gains[(pos_k * p + r) * q + t]),
        };

        // Retire the stale target (kept through EXTEND of this step).
        if self.targets[0] < k {
            self.targets.remove(0);
            self.estimates.remove(0);
            let keep = self.targets.len() * p;
            let total = (w) * p;
            let trimmed = self
                .cov
                .slice(ndarray::s![total - keep.., total - keep..])
                .to_owned();
            self.cov = trimmed;
        }

        self.next_time += 1;
        Ok(output)
    }
}

/// Runs a fresh filter over a full observation sequence.
pub fn run(model: &CheckedModel, y: ArrayView2<'_, f64>) -> Result<Vec<StepOutput>, Error> {
    if y.nrows() == 0 {
        return Err(Error::EmptyHorizon);
    }
    let mut filter = Filter::new(model);
    let mut out = Vec::with_capacity(y.nrows());
    for row in y.rows() {
        out.push(filter.step(row)?);
    }
    Ok(out)
}
