//! Shared helpers for integration tests: deterministic random stable models.
#![allow(dead_code)]

use num_complex::Complex64;
use pasfa::model::{validate, ArmaSpec, CheckedModel, ObservationSpec};
use pasfa::rng::CounterRng;

/// Stateful cursor over a counter-based stream, for test-side draws.
pub struct Draw {
    rng: CounterRng,
    counter: u64,
}

impl Draw {
    pub fn new(seed: u64) -> Self {
        Draw {
            rng: CounterRng::new(seed, 0xD157),
            counter: 0,
        }
    }

    pub fn uniform(&mut self) -> f64 {
        let u = self.rng.uniform_at(self.counter);
        self.counter += 1;
        u
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.uniform() * n as f64) as usize % n
    }
}

/// Expands AR roots into coefficients of `z^L - a_1 z^(L-1) - ... - a_L`.
///
/// Roots must come in conjugate-closed sets so the coefficients are real.
pub fn ar_coeffs_from_roots(roots: &[Complex64]) -> Vec<f64> {
    // Multiply the monic factors (z - r_i); poly[i] is the coefficient of
    // z^(L-i) with poly[0] = 1.
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for &root in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, &coef) in poly.iter().enumerate() {
            next[i] += coef;
            next[i + 1] -= coef * root;
        }
        poly = next;
    }
    poly[1..].iter().map(|c| -c.re).collect()
}

/// Per-channel stable AR coefficients with root moduli at most `max_modulus`,
/// mixing real roots and conjugate pairs.
pub fn stable_ar_channel(draw: &mut Draw, order: usize, max_modulus: f64) -> Vec<f64> {
    let mut roots: Vec<Complex64> = Vec::with_capacity(order);
    let mut remaining = order;
    while remaining > 0 {
        if remaining >= 2 && draw.uniform() < 0.5 {
            let modulus = draw.range(0.1, max_modulus);
            let angle = draw.range(0.2, std::f64::consts::PI - 0.2);
            let root = Complex64::from_polar(modulus, angle);
            roots.push(root);
            roots.push(root.conj());
            remaining -= 2;
        } else {
            roots.push(Complex64::new(draw.range(-max_modulus, max_modulus), 0.0));
            remaining -= 1;
        }
    }
    ar_coeffs_from_roots(&roots)
}

/// A randomized valid model with the given dimensions; deterministic in
/// `seed`.
pub fn random_stable_model(
    seed: u64,
    latent_dim: usize,
    ar_order: usize,
    ma_order: usize,
    obs_dim: usize,
) -> CheckedModel {
    let mut draw = Draw::new(seed);
    let ar_coeffs: Vec<Vec<f64>> = (0..latent_dim)
        .map(|_| stable_ar_channel(&mut draw, ar_order, 0.9))
        .collect();
    let ma_coeffs: Vec<Vec<f64>> = (0..latent_dim)
        .map(|_| (0..ma_order).map(|_| draw.range(-0.8, 0.8)).collect())
        .collect();
    let process_noise_vars: Vec<f64> = (0..latent_dim).map(|_| draw.range(0.3, 2.0)).collect();
    let c: Vec<Vec<f64>> = (0..obs_dim)
        .map(|_| (0..latent_dim).map(|_| draw.range(-1.0, 1.0)).collect())
        .collect();
    let meas_noise_var = draw.range(0.1, 1.0);
    let arma = ArmaSpec {
        latent_dim,
        ar_coeffs,
        ma_coeffs,
        process_noise_vars,
    };
    let obs = ObservationSpec { c, meas_noise_var };
    validate(&arma, &obs).expect("generated model is valid by construction")
}

/// Worst relative deviation between two estimate sequences:
/// `max_k ||a[k] - b[k]|| / (1 + ||b[k]||)`.
pub fn max_relative_deviation(a: &ndarray::Array2<f64>, b: &ndarray::Array2<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut worst = 0.0f64;
    for (ra, rb) in a.rows().into_iter().zip(b.rows()) {
        let mut diff = 0.0;
        let mut norm = 0.0;
        for (&x, &y) in ra.iter().zip(rb.iter()) {
            diff += (x - y) * (x - y);
            norm += y * y;
        }
        worst = worst.max(diff.sqrt() / (1.0 + norm.sqrt()));
    }
    worst
}
