use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// The domain description is inconsistent (grid not divisible into
    /// cells, non-positive conductivity, sink too narrow to hit a node...).
    #[error("invalid domain spec: {0}")]
    Spec(String),

    /// A layout violates its invariants: duplicate cells, out-of-range
    /// cell indices, or non-positive intensities.
    #[error("invalid layout: {0}")]
    Layout(String),

    /// An optimizer or search configuration is inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The linear solver did not reach the requested tolerance within its
    /// iteration budget. Carries the final relative residual.
    #[error("solver did not converge: {message} (relative residual {residual:.3e})")]
    Solver { message: String, residual: f64 },

    /// The assembled system has no Dirichlet nodes (or lost positive
    /// definiteness), so the temperature field is not uniquely determined.
    #[error("singular system: {0}")]
    Singular(String),

    /// Two fields (or a field and a grid) have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A file or stream does not follow the expected format: bad magic,
    /// version mismatch, checksum failure, truncation, or parse errors.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
