use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A law was constructed with parameters outside its admissible range.
    #[error("{law} requires {constraint} (got {value})")]
    InvalidParameter {
        law: &'static str,
        constraint: &'static str,
        value: f64,
    },

    /// A transform was evaluated where its closed form is undefined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Generic argument validation failure.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Measure data violates the discretized-measure invariants.
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// The moment data cannot come from a positive measure.
    #[error("moment sequence is not realizable: {reason}")]
    NotRealizable {
        reason: String,
        /// Recurrence coefficients recovered before the failing pivot.
        partial_alphas: Vec<f64>,
        partial_betas: Vec<f64>,
    },

    /// The Lanczos recurrence produced a (numerically) zero beta.
    #[error("Lanczos breakdown at step {step}: beta = {beta:e}")]
    Breakdown {
        step: usize,
        beta: f64,
        alphas: Vec<f64>,
        betas: Vec<f64>,
    },

    /// The continued fraction hit a zero denominator on the real axis.
    #[error("pole of the continued fraction at x = {x} (level {level})")]
    Pole { x: f64, level: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
