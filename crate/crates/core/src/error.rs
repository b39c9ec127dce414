//! Error type shared across the crate.

/// Everything that can go wrong while checking or constructing structure.
///
/// Numerical check *failures* (an axiom residual exceeding tolerance) are not
/// errors — they are reported as data. Errors are reserved for inputs that make
/// the requested computation meaningless: shape mismatches, prerequisites that
/// do not hold, unreadable files.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("invalid tolerance: {0}")]
    Tolerance(String),
    #[error("not positive semidefinite: {0}")]
    NotPsd(String),
    #[error("numerical decomposition failed: {0}")]
    Numeric(String),
    #[error("not multiplicatively closed: {0}")]
    NotAlgebra(String),
    #[error("not unital: {0}")]
    NotUnital(String),
    #[error("antipode unavailable: {0}")]
    NoAntipode(String),
    #[error("operator is not in the expected leg algebra: {0}")]
    NotLegElement(String),
    #[error("invalid presentation: {0}")]
    Presentation(String),
    #[error("invalid representation: {0}")]
    Representation(String),
    #[error("quasibasis construction failed: {0}")]
    Quasibasis(String),
    #[error("invalid action: {0}")]
    Action(String),
    #[error("support mismatch: {0}")]
    Support(String),
    #[error("prerequisite not met: {0}")]
    Prerequisite(String),
    #[error("file format: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
