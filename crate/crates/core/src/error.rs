use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("output index {index} out of range for {count} outputs")]
    OutputOutOfRange { index: usize, count: usize },

    #[error("zero evidence: observation at step {step} has probability 0 under the prior")]
    ZeroEvidence { step: usize },

    #[error("absolute continuity violated: mu[{state}] > 0 but nu[{state}] = 0")]
    AbsoluteContinuityViolated { state: usize },

    #[error("joint matrix would have {columns} columns, cap is {cap}")]
    SizeCapExceeded { columns: u128, cap: usize },

    #[error("non-finite moment E[a^{k} b^{j}]")]
    NonFiniteMoment { k: usize, j: usize },

    #[error("moment matrix diagonal entry {index} is zero; E[a^{index}] vanishes")]
    SingularDiagonal { index: usize },

    #[error("positivity violated: Q(Z <= x_min) = {value:e} is not above {threshold:e}")]
    PositivityViolated { value: f64, threshold: f64 },

    #[error("quadrature did not converge (last refinement changed the estimate by {change:e})")]
    QuadratureNotConverged { change: f64 },

    #[error("invariant distribution is not unique (starts disagree by {spread:e})")]
    NonUniqueInvariant { spread: f64 },

    #[error("power iteration did not converge in {iterations} iterations")]
    PowerIterationNotConverged { iterations: usize },

    #[error("initial distribution puts mass on state {state} where the invariant law is 0")]
    InfiniteInitialDivergence { state: usize },

    #[error("linear program did not converge in {iterations} pivots")]
    LpNotConverged { iterations: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// `true` for errors that indicate malformed input rather than a failure
    /// while running a well-formed experiment.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::InvalidDistribution(_)
                | Error::InvalidModel(_)
                | Error::OutputOutOfRange { .. }
                | Error::AbsoluteContinuityViolated { .. }
                | Error::InfiniteInitialDivergence { .. }
                | Error::Config(_)
                | Error::Io { .. }
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
