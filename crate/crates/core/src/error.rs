// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the pipeline. Each variant carries the
/// module that produced it so the CLI can report a categorized code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("[{module}] domain error: {msg}")]
    Domain { module: &'static str, msg: String },

    #[error("[{module}] convergence error: {msg}")]
    Convergence { module: &'static str, msg: String },

    #[error("[dynamics] integration error at t = {t:.6e} µs: {msg}")]
    Integration { t: f64, msg: String },

    #[error("[dynamics] eigenstate tracking lost at t = {t:.6e} µs (best overlap {overlap:.3})")]
    Tracking { t: f64, overlap: f64 },

    #[error("[config] {0}")]
    Config(String),

    #[error("[io] {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { module, msg: msg.into() }
    }

    pub(crate) fn convergence(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Convergence { module, msg: msg.into() }
    }

    /// Stable short code used for process exit reporting.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "E_DOMAIN",
            Error::Convergence { .. } => "E_CONVERGENCE",
            Error::Integration { .. } => "E_INTEGRATION",
            Error::Tracking { .. } => "E_TRACKING",
            Error::Config(_) => "E_CONFIG",
            Error::Io(_) => "E_IO",
        }
    }
}
