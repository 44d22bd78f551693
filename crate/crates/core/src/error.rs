use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    #[error("kernel file format error in field `{field}`: {reason}")]
    Format { field: &'static str, reason: String },

    #[error("kernel file checksum mismatch in {field}")]
    Checksum { field: &'static str },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("mean-field integration diverged at step {step} (|u| = {norm:.3e}); try a smaller dt")]
    Instability { step: usize, norm: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("degenerate density: {0}")]
    DegenerateDensity(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
