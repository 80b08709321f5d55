use thiserror::Error;

/// Errors produced by code construction, channel ops, decoding, and the
/// simulation harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two sequences that must have equal length do not.
    #[error("length mismatch for {what}: expected {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    /// Both inputs of a probability-domain g node sit on conflicting
    /// endpoints, so its normalizing denominator is zero.
    #[error("degenerate g-node input: pa={pa}, pb={pb}")]
    DegenerateInput { pa: f64, pb: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
