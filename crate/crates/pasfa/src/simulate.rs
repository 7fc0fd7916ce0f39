//! Trajectory generation from the data-generating process.
//!
//! Noise is drawn from [`CounterRng`] streams keyed by `(seed, stream, k)`, so
//! a trajectory is a pure function of `(model, horizon, seed)` regardless of
//! execution order or parallelism. Stream 0 carries the process noise, stream
//! 1 the measurement noise; the normal at time `k`, channel `j` sits at normal
//! index `k * dim + j` of its stream.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::Error;
use crate::model::CheckedModel;
use crate::rng::{CounterRng, STREAM_MEASUREMENT_NOISE, STREAM_PROCESS_NOISE};

/// A simulated draw from the model over `horizon` time points.
///
/// `x` always satisfies the latent difference equation given `e` exactly
/// (it is produced by [`apply_dynamics`]), and `y = C x + eps` row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub horizon: usize,
    /// Process noise, `horizon x latent_dim`.
    pub e: Array2<f64>,
    /// Latent states, `horizon x latent_dim`.
    pub x: Array2<f64>,
    /// Observations, `horizon x obs_dim`.
    pub y: Array2<f64>,
    /// Seed the noise streams were keyed with (0 when loaded from a CSV,
    /// which does not record it; see the sidecar).
    pub seed: u64,
}

/// JSON sidecar written next to a trajectory CSV.
///
/// `generated_at_unix` is the only wall-clock field in any output and is
/// ignored by reproducibility checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectorySidecar {
    pub seed: u64,
    pub horizon: usize,
    pub model_hash: String,
    pub generated_at_unix: u64,
}

/// Runs the latent difference equation over a given noise sequence.
///
/// States and noise are zero at negative time instants, so the recursion
/// starts cold. Deterministic; panics if `e` is not `T x latent_dim`.
pub fn apply_dynamics(model: &CheckedModel, e: ArrayView2<'_, f64>) -> Array2<f64> {
    let t = e.nrows();
    let p = model.latent_dim();
    assert_eq!(e.ncols(), p, "noise sequence width must equal latent_dim");
    let l = model.ar_order();
    let m = model.ma_order();
    let mut x = Array2::<f64>::zeros((t, p));
    for k in 0..t {
        // x[k] = sum_l A_l x[k-l] + e[k] + sum_j B_j e[k-j]
        for col in 0..p {
            x[[k, col]] = e[[k, col]];
        }
        for lag in 1..=l.min(k) {
            let a = &model.ar_blocks()[lag - 1];
            for r in 0..p {
                let mut acc = 0.0;
                for ccol in 0..p {
                    acc += a[[r, ccol]] * x[[k - lag, ccol]];
                }
                x[[k, r]] += acc;
            }
        }
        for lag in 1..=m.min(k) {
            let b = &model.ma_blocks()[lag - 1];
            for r in 0..p {
                let mut acc = 0.0;
                for ccol in 0..p {
                    acc += b[[r, ccol]] * e[[k - lag, ccol]];
                }
                x[[k, r]] += acc;
            }
        }
    }
    x
}

/// Draws a full trajectory. Same `(model, horizon, seed)` gives bit-identical
/// output.
pub fn simulate(model: &CheckedModel, horizon: usize, seed: u64) -> Result<Trajectory, Error> {
    if horizon == 0 {
        return Err(Error::EmptyHorizon);
    }
    let p = model.latent_dim();
    let q = model.obs_dim();
    let proc_rng = CounterRng::new(seed, STREAM_PROCESS_NOISE);
    let meas_rng = CounterRng::new(seed, STREAM_MEASUREMENT_NOISE);
    let sigma: Vec<f64> = (0..p).map(|j| model.sigma_e()[[j, j]].sqrt()).collect();
    let meas_sd = model.meas_noise_var().sqrt();

    let e = Array2::from_shape_fn((horizon, p), |(k, j)| {
        sigma[j] * proc_rng.normal_at((k * p + j) as u64)
    });
    let x = apply_dynamics(model, e.view());
    let c = model.observation_matrix();
    let mut y = x.dot(&c.t());
    for k in 0..horizon {
        for i in 0..q {
            y[[k, i]] += meas_sd * meas_rng.normal_at((k * q + i) as u64);
        }
    }
    Ok(Trajectory {
        horizon,
        e,
        x,
        y,
        seed,
    })
}

impl Trajectory {
    /// Writes the CSV schema `k, e_1.., x_1.., y_1..` (LF line endings).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
        let p = self.e.ncols();
        let q = self.y.ncols();
        let mut header = vec!["k".to_string()];
        header.extend((1..=p).map(|j| format!("e_{j}")));
        header.extend((1..=p).map(|j| format!("x_{j}")));
        header.extend((1..=q).map(|j| format!("y_{j}")));
        w.write_record(&header)?;
        for k in 0..self.horizon {
            let mut record = vec![k.to_string()];
            record.extend((0..p).map(|j| self.e[[k, j]].to_string()));
            record.extend((0..p).map(|j| self.x[[k, j]].to_string()));
            record.extend((0..q).map(|j| self.y[[k, j]].to_string()));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<(), Error> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads the CSV schema back. Column widths are inferred from the header;
    /// the seed is not stored in the CSV and comes back as 0.
    pub fn read_csv<R: Read>(reader: R) -> Result<Trajectory, Error> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let names: Vec<&str> = header.iter().collect();
        if names.first() != Some(&"k") {
            return Err(Error::Parse("trajectory CSV must start with column 'k'".into()));
        }
        let p = names.iter().filter(|n| n.starts_with("e_")).count();
        let px = names.iter().filter(|n| n.starts_with("x_")).count();
        let q = names.iter().filter(|n| n.starts_with("y_")).count();
        if p == 0 || p != px || q == 0 || names.len() != 1 + 2 * p + q {
            return Err(Error::Parse(format!(
                "unexpected trajectory header: {names:?}"
            )));
        }
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for record in r.records() {
            let record = record?;
            let mut row = Vec::with_capacity(2 * p + q);
            for field in record.iter().skip(1) {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {field:?} in trajectory")))?;
                row.push(v);
            }
            if row.len() != 2 * p + q {
                return Err(Error::Parse("ragged trajectory row".into()));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::EmptyHorizon);
        }
        let t = rows.len();
        let mut e = Array2::<f64>::zeros((t, p));
        let mut x = Array2::<f64>::zeros((t, p));
        let mut y = Array2::<f64>::zeros((t, q));
        for (k, row) in rows.iter().enumerate() {
            for j in 0..p {
                e[[k, j]] = row[j];
                x[[k, j]] = row[p + j];
            }
            for j in 0..q {
                y[[k, j]] = row[2 * p + j];
            }
        }
        Ok(Trajectory {
            horizon: t,
            e,
            x,
            y,
            seed: 0,
        })
    }

    pub fn read_csv_file(path: &Path) -> Result<Trajectory, Error> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}
