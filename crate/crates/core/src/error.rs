use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate classical solutions: Wronskian {0:e} must be positive and nonzero")]
    DegenerateSolutions(f64),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("Wronskian drift {drift:e} exceeds tolerance {tol:e} at t = {t}")]
    WronskianDrift { drift: f64, tol: f64, t: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("support error: {0}")]
    Support(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("stability error: norm drifted by {drift:e} at t = {t}")]
    Stability { drift: f64, t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
