use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("rates were evaluated at delta = {rates}, system has delta = {system}")]
    DeltaMismatch { rates: f64, system: f64 },

    #[error("operation requires spin 1/2, got 2J = {two_j}")]
    RequiresSpinHalf { two_j: u32 },

    #[error("outside the validity of the perturbative derivation: {0}")]
    OutsideValidity(String),

    #[error("exponential integral is singular at x = 0")]
    SingularArgument,

    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {error:e})")]
    QuadratureNoConvergence { subdivisions: usize, error: f64 },

    #[error("state became non-finite at t = {time}")]
    NonFinite { time: f64 },

    #[error("equilibrium expression has a vanishing denominator")]
    DegenerateEquilibrium,

    #[error("series never crosses level {level}")]
    NoCrossing { level: f64 },

    #[error("found {found} beat node(s), need at least two")]
    TooFewNodes { found: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
