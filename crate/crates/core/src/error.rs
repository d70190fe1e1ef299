//! Error type shared by every module, with the process exit-code mapping used by the CLI.

use thiserror::Error;

/// All failures reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("front positions must be strictly increasing (violated at index {index})")]
    NonMonotonePositions { index: usize },

    #[error("forcing F(±1, 0, x) exceeds the bound {bound} at x = {x} (value {value})")]
    UnboundedForcing { x: f64, value: f64, bound: f64 },

    #[error("adaptive quadrature did not converge on [{a}, {b}]: estimate {value}, error {error}")]
    QuadratureNotConverged { a: f64, b: f64, value: f64, error: f64 },

    #[error("integral diverges: {0}")]
    DivergentIntegral(String),

    #[error("root not bracketed on [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },

    #[error("step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("two-front matching condition not satisfied (residual {residual:e})")]
    ConditionNotSatisfied { residual: f64 },

    #[error("tail sign condition failed: {0}")]
    SignConditionFailed(String),

    #[error("decay rate mu = {mu} is not below the validity bound {bound} for N = {n}")]
    MuOutOfValidity { mu: f64, bound: f64, n: usize },

    #[error("front separation ratio rho = {rho} is below 1: no stationary pattern exists")]
    SeparationTooSmall { rho: f64 },

    #[error("NaN or infinity detected in the solution at t = {t}")]
    NaNDetected { t: f64 },

    #[error("iteration did not converge: {0}")]
    NotConverged(String),

    #[error("spectral parameter {re} + {im}i lies on the branch cut (-inf, -2]")]
    OnBranchCut { re: f64, im: f64 },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Library result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code used by the command-line front end: 2 for numerical failures, 3 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonMonotonePositions { .. }
            | Error::UnknownScenario(_)
            | Error::InvalidInput(_)
            | Error::SignConditionFailed(_)
            | Error::SeparationTooSmall { .. }
            | Error::MuOutOfValidity { .. }
            | Error::OnBranchCut { .. }
            | Error::Json(_)
            | Error::Csv(_)
            | Error::Io(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
