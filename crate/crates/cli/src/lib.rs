//! Batch driver for `robin-core`: reads domain specs, runs solvers and
//! checks, writes CSV/JSON results and SVG plots.

pub mod commands;
pub mod grid;
pub mod io;
pub mod svg;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or inconsistent inputs.
    #[error("configuration error: {0}")]
    Config(String),
    /// A solver finished without meeting its convergence target.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl From<robin_core::Error> for CliError {
    fn from(e: robin_core::Error) -> Self {
        match e {
            robin_core::Error::NoConvergence(m) => CliError::NonConvergence(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
