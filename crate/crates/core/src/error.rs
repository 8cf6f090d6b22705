use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("invalid lambda: {0}")]
    InvalidLambda(String),
    #[error("invalid involution: {0}")]
    InvalidInvolution(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("form is not hermitian: {0}")]
    NotHermitian(String),
    #[error("form is degenerate: {0}")]
    Degenerate(String),
    #[error("element outside the maximal form parameter: {0}")]
    NotInLMax(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("bad block indices: {0}")]
    BadBlock(String),
    #[error("carrier too large: {0}")]
    CarrierTooLarge(String),
    #[error("cap exceeded: {what} would exceed {cap} elements")]
    CapExceeded { what: String, cap: usize },
    #[error("not a level: {0}")]
    NotALevel(String),
    #[error("gamma membership undecidable: {0}")]
    GammaMembershipUndecidable(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
