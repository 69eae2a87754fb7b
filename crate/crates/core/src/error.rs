use thiserror::Error;

/// Errors raised by field arithmetic, grid operations and configuration handling.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands built over different fields, grids or domains.
    #[error("usage error: {0}")]
    Usage(String),
    /// Input outside the mathematical domain of an operation (inverse of zero,
    /// off-lattice translation, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A value does not fit the configured digit window or grid.
    #[error("range error: {0}")]
    Range(String),
    /// Every violation found while validating a configuration.
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
