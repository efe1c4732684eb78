//! Error type shared across the crate.

use thiserror::Error;

/// All failure modes of the simulator.
#[derive(Debug, Error)]
pub enum ScrnError {
    /// A parameter solve could not bracket a root (target mean outside the
    /// achievable range of the distribution family).
    #[error("cannot bracket parameter: {0}")]
    NonBracketable(String),

    /// A rejection sampler exceeded its iteration cap; indicates a logic bug
    /// or a pathological parameter, never expected in normal operation.
    #[error("internal sampling failure: rejection loop exceeded {0} iterations")]
    InternalSamplingFailure(u64),

    /// A scenario configuration violates a model invariant.
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    /// The degree-sequence consistency repair loop did not equalize layer sums.
    #[error("consistency repair exhausted after {0} redraw steps")]
    RepairExhausted(u64),

    /// The mean-gap filter rejected too many consecutive network samples.
    #[error("mean-gap filter rejected {0} consecutive samples")]
    RejectionExhausted(u64),

    /// Two sequences that must be equally long are not.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// OFR is undefined when total demand is zero.
    #[error("zero total demand")]
    ZeroDemand,

    /// Summary statistics of an empty sample are undefined.
    #[error("empty input")]
    EmptyInput,

    /// A scenario file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },

    /// Underlying I/O failure.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, ScrnError>;
