use thiserror::Error;

/// Errors produced by map construction, density, entropy and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("slopes must exceed 1 (got s = {s}, t = {t})")]
    SlopeOutOfRange { s: f64, t: f64 },

    #[error("map does not send [0,1] into itself: 1/s + 1/t = {sum} < 1")]
    NotSelfMap { sum: f64 },

    #[error("argument {value} outside its domain: {what}")]
    DomainError { what: &'static str, value: f64 },

    #[error("invalid piecewise linear map: {0}")]
    InvalidMap(String),

    #[error("invalid step density: {0}")]
    InvalidDensity(String),

    #[error("map is mixing (s t^2 - s - t = {excess} > 0) and cannot be renormalized")]
    NotRenormalizable { excess: f64 },

    #[error("no root found: {0}")]
    NoRoot(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("minimum slope {0} does not exceed 1")]
    SlopeTooSmall(f64),

    #[error("density has non-positive mass {0}")]
    ZeroMass(f64),

    #[error("density is not normalized (integral = {0})")]
    NotNormalized(f64),

    #[error("kneading determinant has no root in (0, 1)")]
    NoRootInUnitInterval,

    #[error("lap count would exceed the cap of {cap}")]
    Overflow { cap: usize },

    #[error(
        "power iteration did not converge after {iterations} iterations (last change {change})"
    )]
    NoConvergence { iterations: usize, change: f64 },

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("invalid target (a = {a}, b = {b}): {reason}")]
    InvalidTarget { a: f64, b: f64, reason: String },

    #[error("rectangular root is not expanding: slope magnitude {0} <= 1")]
    NotExpanding(f64),

    #[error("topological entropy is not monotone in s: {0}")]
    NotMonotone(String),
}

pub type Result<T> = std::result::Result<T, Error>;
