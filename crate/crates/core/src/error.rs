use alloc::string::String;
use alloc::vec::Vec;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("dimension n = {0} is not supported (need n >= 3)")]
    Dimension(u32),
    #[error("{what} = {value} outside the admissible range {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: String,
    },
    #[error("NWSS value {0} is below the Serrin bound 1")]
    BelowSerrinBound(f64),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("invalid domain: {reason} (direction {direction:?})")]
    InvalidDomain {
        reason: &'static str,
        direction: [f64; 3],
    },
    #[error("grid under-resolves the domain: gap/h = {ratio:.3}, need at least {required}")]
    Resolution { ratio: f64, required: f64 },
    #[error(
        "linear solve did not converge in {iterations} iterations (relative residual {residual:e})"
    )]
    Convergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("degenerate normal: |grad phi| = {0:e}")]
    DegenerateNormal(f64),
    #[error("{flagged} of {total} samples rejected while {stage}")]
    TooManyFlagged {
        stage: &'static str,
        flagged: usize,
        total: usize,
    },
    #[error("normalization inconsistency: scaled value {scaled} exceeds model maximum {limit}")]
    Normalization { scaled: f64, limit: f64 },
    #[error("{0}")]
    Inconsistent(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn finite(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(what))
    }
}
