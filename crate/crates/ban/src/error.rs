use thiserror::Error;

/// Errors shared across the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("automaton index {index} out of range for size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("network size {n} exceeds the {what} ceiling of {limit}")]
    SizeCeiling {
        n: usize,
        limit: usize,
        what: &'static str,
    },

    #[error("operation requires a locally monotone network; unsigned arcs: {arcs:?}")]
    NonMonotoneNetwork { arcs: Vec<(usize, usize)> },

    #[error("invalid transition {from} -> {to}: {reason}")]
    InvalidTransition {
        from: String,
        to: String,
        reason: String,
    },

    #[error("decomposition produced an invalid step {from} -> {to}; this contradicts the block construction on monotone networks")]
    StepInvalid { from: String, to: String },

    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("truth table for automaton {index} has {got} entries, expected {expected}")]
    BadTable {
        index: usize,
        got: usize,
        expected: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
