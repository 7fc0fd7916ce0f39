//! Crate-wide error type.

use std::fmt;

/// Errors raised by model validation, inference, metrics, and the CLI.
#[derive(Debug)]
pub enum Error {
    /// A latent channel's AR polynomial has a root on or outside the unit circle.
    NonStationary { channel: usize, modulus: f64 },
    /// A variance that must be strictly positive is zero or negative.
    NonPositiveVariance { name: String },
    /// Inconsistent array shapes in a model specification or between a model
    /// and the data fed to it.
    DimensionMismatch { what: String },
    /// A NaN or infinity where a finite number is required.
    NonFinite { what: String },
    /// `prior_cov(k, l)` queried with `l > k`.
    InvalidLag { lag: usize, time: usize },
    /// Innovation covariance lost positive definiteness (cannot happen for a
    /// validated model; guarded anyway).
    SingularInnovationCovariance,
    /// Batch oracle horizon exceeds the configured cap.
    CapExceeded { horizon: usize, cap: usize },
    /// Metric inputs have different shapes.
    ShapeMismatch { what: String },
    /// Pearson correlation requested on a constant sequence.
    DegenerateVariance { channel: usize },
    /// A horizon of zero time points was requested.
    EmptyHorizon,
    /// Malformed configuration or data file content.
    Parse(String),
    /// Operating-system level I/O failure.
    Io(std::io::Error),
}

impl Error {
    /// CLI exit code: 2 validation, 3 I/O, 4 method-specific cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 3,
            Error::CapExceeded { .. } => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonStationary { channel, modulus } => write!(
                f,
                "NonStationary: channel {channel} has max AR root modulus {modulus}"
            ),
            Error::NonPositiveVariance { name } => {
                write!(f, "NonPositiveVariance: {name} must be strictly positive")
            }
            Error::DimensionMismatch { what } => write!(f, "DimensionMismatch: {what}"),
            Error::NonFinite { what } => write!(f, "NonFinite: {what}"),
            Error::InvalidLag { lag, time } => {
                write!(f, "InvalidLag: lag {lag} exceeds time index {time}")
            }
            Error::SingularInnovationCovariance => {
                write!(f, "SingularInnovationCovariance: innovation covariance not SPD")
            }
            Error::CapExceeded { horizon, cap } => write!(
                f,
                "CapExceeded: batch oracle horizon {horizon} exceeds cap {cap}"
            ),
            Error::ShapeMismatch { what } => write!(f, "ShapeMismatch: {what}"),
            Error::DegenerateVariance { channel } => write!(
                f,
                "DegenerateVariance: channel {channel} has zero sample variance"
            ),
            Error::EmptyHorizon => write!(f, "EmptyHorizon: horizon must be at least 1"),
            Error::Parse(msg) => write!(f, "Parse: {msg}"),
            Error::Io(err) => write!(f, "Io: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        if err.is_io() {
            Error::Io(err.into())
        } else {
            Error::Parse(err.to_string())
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        if err.is_io_error() {
            match err.into_kind() {
                csv::ErrorKind::Io(io) => Error::Io(io),
                other => Error::Parse(format!("{other:?}")),
            }
        } else {
            Error::Parse(err.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(
            Error::NonStationary {
                channel: 0,
                modulus: 1.2
            }
            .exit_code(),
            2
        );
        assert_eq!(
            Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, "x")).exit_code(),
            3
        );
        assert_eq!(Error::CapExceeded { horizon: 2000, cap: 500 }.exit_code(), 4);
    }

    #[test]
    fn display_names_variant() {
        let msg = Error::NonStationary {
            channel: 1,
            modulus: 1.2,
        }
        .to_string();
        assert!(msg.contains("NonStationary"));
        assert!(Error::EmptyHorizon.to_string().contains("horizon"));
    }
}
