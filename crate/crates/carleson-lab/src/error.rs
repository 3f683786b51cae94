use thiserror::Error;

/// Errors surfaced by the lab's numerical operations.
#[derive(Debug, Error)]
pub enum LabError {
    /// A sample count that is not a power of two (fast transforms require one).
    #[error("signal length {0} is not a power of two >= 2")]
    BadSize(usize),
    /// An evaluation point outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A precondition on operator parameters was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Mismatched grids, axes or dimensions between operands.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
