use thiserror::Error;

/// Errors raised by the library. Numerical non-convergence is reported
/// through flagged results where a value is still meaningful, and through
/// [`Error::NonConvergence`] where it is not.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid precision context: {0}")]
    InvalidPrecision(String),
    #[error("incompatible series offsets {0} and {1}")]
    IncompatibleOffsets(String, String),
    #[error("composition requires an inner series with positive integer offset and no constant term")]
    NonzeroConstantTerm,
    #[error("argument {arg} outside branch range ({lo}, {hi})")]
    OutsideBranch { arg: f64, lo: f64, hi: f64 },
    #[error("zero raised to a negative power")]
    ZeroToNegativePower,
    #[error("{0} did not converge: {1}")]
    NonConvergence(&'static str, String),
    #[error("evaluation point too close to a pole: {0}")]
    PoleHit(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
    #[error("parity requirement not met: {0}")]
    ParityMismatch(String),
    #[error("point outside the domain: {0}")]
    OutsideDomain(String),
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("membership indeterminate: |mean| = {0:e}")]
    Indeterminate(f64),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
