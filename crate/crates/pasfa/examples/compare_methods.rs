//! Multi-trial evaluation in the layout of the reference experiment: mean
//! MSE and correlation (std in brackets) per method over independent seeded
//! trials, plus innovation whiteness.
//!
//! ```bash
//! cargo run --release --example compare_methods
//! ```

use pasfa::metrics::{self, MethodMetrics, TrialMetrics};
use pasfa::model::ModelConfig;
use pasfa::oracles::static_posterior;
use pasfa::rng::trial_seed;
use pasfa::simulate::simulate;
use pasfa::filter;

fn main() {
    let model = ModelConfig::demo_scalar_arma11().validate().unwrap();
    let trials = 10u64;
    let horizon = 2000;
    let master_seed = 1;

    let mut per_trial = Vec::new();
    for trial in 0..trials {
        let seed = trial_seed(master_seed, trial);
        let traj = simulate(&model, horizon, seed).unwrap();
        let outputs = filter::run(&model, traj.y.view()).unwrap();
        let mut recursive = ndarray::Array2::<f64>::zeros((horizon, 1));
        for (k, step) in outputs.iter().enumerate() {
            recursive[[k, 0]] = step.filtered[0];
        }
        let baseline = static_posterior(&model, traj.y.view());
        let mut methods = Vec::new();
        for (name, est) in [("recursive", &recursive), ("static", &baseline)] {
            methods.push(MethodMetrics {
                method: name.into(),
                mse: metrics::mse(traj.x.view(), est.view()).unwrap(),
                correlation: metrics::pearson(traj.x.view(), est.view()).unwrap(),
            });
        }
        per_trial.push(TrialMetrics { seed, methods });
    }

    let report = metrics::trial_summary(&per_trial, horizon);
    print!("{}", report.render_table());
    println!("\n(static = stationary per-sample posterior, the dynamics-free baseline;");
    println!(" the same table is written by `pasfa compare` as JSON + text + plot CSVs)");
}
