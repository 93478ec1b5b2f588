use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// No decaying positive solution exists at or above the critical frequency.
    #[error("no solitary wave for omega = {omega} (omega* = {omega_star})")]
    NoSolitaryWave { omega: f64, omega_star: f64 },

    /// The quasi-linear denominator `1 - |phi|^(2 alpha)` is no longer positive.
    #[error("denominator blow-up: max |phi| = {max_modulus}")]
    DenominatorBlowup { max_modulus: f64 },

    #[error("saturation violated: initial peak {peak} must stay below 1")]
    SaturationViolation { peak: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("slope does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("insufficient fit window: {0}")]
    InsufficientWindow(String),

    #[error("energy drift delta = {delta:.3e} exceeds {bound:.1e} at t = {time}")]
    AccuracyAbort { time: f64, delta: f64, bound: f64 },

    #[error("too few samples: need {needed}, have {have}")]
    TooFewSamples { needed: usize, have: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
