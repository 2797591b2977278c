use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the domain an operator is defined on.
    #[error("invalid parameter `{name}`: {msg}")]
    InvalidParameter { name: &'static str, msg: String },

    /// Input data broke a structural invariant (lengths, finiteness of
    /// supplied samples, missing derivative data).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A non-finite value appeared while evaluating an operator. The index
    /// locates the offending node.
    #[error("non-finite value at node {index} ({context})")]
    NonFinite { index: usize, context: &'static str },

    /// Two sampled functions live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The corrector iteration failed at a node and the safeguarded root
    /// solve could not recover.
    #[error("corrector failed to converge at node {node} (t = {t})")]
    CorrectorDiverged { node: usize, t: f64 },

    /// Numerical Laplace inversion produced a non-finite contour sum.
    #[error("laplace inversion failed at t = {t}: {msg}")]
    Inversion { t: f64, msg: String },

    /// A structural condition required by a theorem does not hold.
    #[error("condition {name} violated: {msg}")]
    ConditionViolated { name: &'static str, msg: String },

    /// A check was asked for with an unusable configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Not enough data to run a diagnostic (e.g. too few envelope points).
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Evaluation requested outside the domain of definition.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
