//! Recursive MMSE inference of slowly varying latent features that evolve as
//! a vector ARMA process and are observed through a linear Gaussian map.
//!
//! The centerpiece is [`filter::Filter`], which produces exact minimum
//! mean-square-error state estimates recursively, at a per-step cost
//! independent of the horizon, operating directly on the original states
//! instead of an augmented state space. Equivalence with two independent references
//! (an exact batch Gaussian conditional mean and a Kalman filter on the
//! augmented state space, both in [`oracles`]) is part of the test suite.
//!
//! # Quick start
//!
//! ```
//! use pasfa::model::ModelConfig;
//! use pasfa::{filter, simulate};
//!
//! let model = ModelConfig::demo_scalar_arma11().validate().unwrap();
//! let traj = simulate::simulate(&model, 200, 7).unwrap();
//! let outputs = filter::run(&model, traj.y.view()).unwrap();
//! assert_eq!(outputs.len(), 200);
//! ```
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release --example validate_model        # model checks & derived quantities
//! cargo run --release --example simulate_trajectory   # seeded generation, moment checks
//! cargo run --release --example recursive_filter      # filtering a noisy trajectory
//! cargo run --release --example kalman_reduction      # L=1, M=0 degenerates to Kalman
//! cargo run --release --example oracle_equivalence    # filter vs batch vs augmented
//! cargo run --release --example compare_methods       # multi-trial evaluation table
//! ```
//!
//! A thin `pasfa` binary exposes the same flows over files (`simulate`,
//! `filter`, `compare`); see the README for the CSV and JSON schemas.

pub mod cli;
pub mod error;
pub mod filter;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod oracles;
pub mod rng;
pub mod simulate;

pub use error::Error;
pub use filter::{Filter, StepOutput};
pub use metrics::{MetricsReport, TrialMetrics};
pub use model::{ArmaSpec, CheckedModel, ModelConfig, ObservationSpec};
pub use simulate::Trajectory;
