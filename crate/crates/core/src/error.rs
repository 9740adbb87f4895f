use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A model or input description is malformed.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument lies outside the domain of the requested quantity.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
