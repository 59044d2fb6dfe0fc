//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by model construction, gradient evaluation and the
/// register-level simulator.
#[derive(Debug, Error)]
pub enum QcrfError {
    #[error("{what}: expected length {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("label index {label} out of range for alphabet of size {q}")]
    LabelOutOfRange { label: usize, q: usize },

    #[error("enumeration too large: {states} label sequences exceed the cap of {cap}")]
    EnumerationTooLarge { states: u128, cap: u128 },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("operator index out of range: {what} = {index} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("simulation cap exceeded: {branches} branches > {cap}")]
    SimulationCapExceeded { branches: u128, cap: u128 },

    #[error("register {register} must be zero on every branch before phase estimation")]
    RegisterNotZero { register: &'static str },

    #[error("register {register} does not match the recomputed value on branch {branch}: expected {expected}, found {found}")]
    RegisterMismatch {
        register: &'static str,
        branch: u64,
        expected: i64,
        found: i64,
    },

    #[error("fixed-point saturation on branch {branch}: |{value}| exceeds the representable range")]
    FixedPointSaturation { branch: u64, value: f64 },

    #[error("rotation constant too large: C = {c} gives amplitude {q_max} > 1 (lambda_max = {lambda_max})")]
    RotationAmplitudeTooLarge { c: f64, q_max: f64, lambda_max: f64 },

    #[error("negative lambda code on branch {branch}: controlled rotation requires a nonnegative part (value {value})")]
    NegativeLambda { branch: u64, value: f64 },

    #[error("post-selection starved: no success within {attempts} attempts")]
    PostSelectionStarved { attempts: u64 },

    #[error("training diverged: nll increased for {consecutive} consecutive iterations (iteration {iteration}, nll {nll})")]
    TrainingDiverged {
        iteration: usize,
        consecutive: usize,
        nll: f64,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QcrfError>;
