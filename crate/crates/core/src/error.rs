use thiserror::Error;

/// Errors raised by the metric, simulation and power-analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("insufficient data: {what} needs at least {required} values, got {actual}")]
    InsufficientData {
        what: &'static str,
        required: usize,
        actual: usize,
    },

    #[error("degenerate variance: both groups are constant, the t-statistic is undefined")]
    DegenerateVariance,

    #[error("degenerate dispersion: all values are equal, {0} is undefined")]
    DegenerateDispersion(&'static str),

    #[error("zero standard error for {0}: the z-test cannot be formed")]
    ZeroStandardError(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("sweep cell theta={theta}, n={n_tests}: {source}")]
    Cell {
        theta: f64,
        n_tests: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
