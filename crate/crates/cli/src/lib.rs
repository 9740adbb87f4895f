//! Curve generation for the `sampled-rd` command-line tool.
//!
//! Evaluations over parameter grids are collected into [`CurveSeries`] and
//! written as CSV or JSON. The [`figures`] module rebuilds the standard
//! curves of sampled distortion-rate analysis from fixed model setups.

pub mod figures;
pub mod format;
pub mod grid;
pub mod psd_arg;
pub mod series;

pub use grid::parse_grid;
pub use psd_arg::PsdChoice;
pub use series::CurveSeries;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or inconsistent arguments; reported with exit code 2.
    #[error("{0}")]
    Usage(String),

    /// A solver failed on valid input; reported with exit code 1.
    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<sampled_rd::Error> for CliError {
    fn from(e: sampled_rd::Error) -> Self {
        match e {
            sampled_rd::Error::NoConvergence { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let domain: CliError = sampled_rd::Error::Domain("f_s".into()).into();
        assert_eq!(domain.exit_code(), 2);
        let stalled: CliError = sampled_rd::Error::NoConvergence { what: "level", iterations: 400, residual: 1.0 }.into();
        assert_eq!(stalled.exit_code(), 1);
    }
}
