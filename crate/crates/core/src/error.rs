//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent configuration (bad file, unknown key,
    /// parameter out of range, failed self-consistency check).
    #[error("configuration error: {0}")]
    Config(String),

    /// A numeric argument left the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A nonlinearity value fell outside its declared sector bounds.
    #[error("value {value} outside sector [{lower}, {upper}]")]
    OutOfSector { value: f64, lower: f64, upper: f64 },

    /// Mismatched vector/matrix sizes in a blending operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A membership vector failed validation (negative weight, bad sum).
    #[error("invalid membership vector: {0}")]
    Membership(String),

    /// Gain synthesis failed for one scheduling vertex.
    #[error("gain synthesis failed at vertex {vertex}: {reason}")]
    Synthesis { vertex: usize, reason: String },

    /// The plant integrator produced a non-finite state.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// A closed-loop run diverged at the given step index.
    #[error("simulation diverged at step {step} (t = {time:.3} s)")]
    IntegrationDiverged { step: usize, time: f64 },

    /// A CSV file could not be parsed.
    #[error("{path}:{line}: {msg}")]
    CsvParse {
        path: String,
        line: usize,
        msg: String,
    },

    /// A metrics computation was asked of an unsuitable log.
    #[error("metrics error: {0}")]
    Metrics(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
