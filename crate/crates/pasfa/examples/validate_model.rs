//! Model validation and the derived quantities the filter is built from:
//! window length, impulse responses, cross-covariances, prior covariances.
//!
//! ```bash
//! cargo run --release --example validate_model
//! ```

use pasfa::model::{validate, ArmaSpec, ModelConfig, ObservationSpec};

fn main() {
    let config = ModelConfig::demo_scalar_arma11();
    println!("config JSON:\n{}\n", serde_json::to_string_pretty(&config).unwrap());

    let model = config.validate().expect("demo model is stationary");
    println!("latent_dim = {}", model.latent_dim());
    println!("obs_dim    = {}", model.obs_dim());
    println!(
        "orders     = ARMA({}, {}), window N = max(L, M+1) = {}",
        model.ar_order(),
        model.ma_order(),
        model.window_len()
    );

    let h = model.impulse_response(5);
    println!("\nimpulse response h[0..5] (x[k] = sum_j h[j] e[k-j]):");
    for (j, hj) in h.iter().enumerate() {
        println!("  h[{j}] = {:.6}", hj[[0, 0]]);
    }

    println!("\ncross-covariance gamma_ex[l] = E(e[k] x[k-l]):");
    for lag in [-2i64, -1, 0, 1, 2] {
        println!("  gamma_ex[{lag:+}] = {:.6}", model.cross_cov_ex(lag)[[0, 0]]);
    }

    println!("\ntransient prior variances E[x[k]^2] (zero initial conditions):");
    for k in 0..6 {
        println!("  k={k}: {:.6}", model.prior_cov(k, 0).unwrap()[[0, 0]]);
    }
    println!("  stationary: {:.6}", model.stationary_cov(0)[[0, 0]]);

    // Validation rejects unstable dynamics and degenerate variances.
    let explosive = validate(
        &ArmaSpec::scalar(&[1.2], &[], 1.0),
        &ObservationSpec::scalar(1.0, 1.0),
    );
    println!("\nAR coefficient 1.2 -> {}", explosive.unwrap_err());
    let no_noise = validate(
        &ArmaSpec::scalar(&[0.5], &[], 1.0),
        &ObservationSpec::scalar(1.0, 0.0),
    );
    println!("zero measurement variance -> {}", no_noise.unwrap_err());
}
