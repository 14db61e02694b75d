use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("singular matrix: zero pivot in column {column}")]
    SingularMatrix { column: usize },

    #[error("Newton iteration at h = {h} did not reach a cycle: {reason}")]
    NewtonFailed { h: usize, reason: String },

    #[error("step h = {h} collapsed onto the equilibrium family")]
    EquilibriumCollapse { h: usize },

    #[error("non-positive frequency {omega} after step h = {h}")]
    NonPositiveFrequency { h: usize, omega: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed solution file: {0}")]
    Parse(String),

    #[error("step size underflow at t = {t} (step {step:e})")]
    StepUnderflow { t: f64, step: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
