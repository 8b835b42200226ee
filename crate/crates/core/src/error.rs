//! Crate-wide error type. Validation failures are reported as structured
//! errors; no routine panics on malformed numeric input.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: max deviation {0:.3e}")]
    NotHermitian(f64),

    #[error("matrix is not unitary: max deviation {0:.3e}")]
    NotUnitary(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("ket is not normalized: norm {0}")]
    NotNormalized(f64),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid priors: {0}")]
    InvalidPriors(String),

    #[error("angle {angle} lies outside the valid interval ({lo}, {hi}){exclusions}")]
    AngleOutOfRange {
        angle: f64,
        lo: f64,
        hi: f64,
        exclusions: String,
    },

    #[error("measurement completeness violated: {0}")]
    Incomplete(String),

    #[error("ensemble must contain at least {needed} members, got {got}")]
    TooFewMembers { needed: usize, got: usize },

    #[error("objective returned a non-finite value; search aborted")]
    NonFiniteObjective,

    #[error("invalid search budget: {0}")]
    InvalidBudget(String),

    #[error("invalid measurement spec: {0}")]
    Spec(String),

    #[error("unknown scenario name {0:?}")]
    UnknownScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
