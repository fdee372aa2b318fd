use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("support size {size} exceeds the cap of {cap}")]
    SupportTooLarge { size: usize, cap: usize },

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("{count} vectors exceed the enumeration cap of {cap}")]
    TooManyVectors { count: usize, cap: usize },

    #[error("vector family is zero: {0}")]
    ZeroFamily(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid bound {value}: constants must be at least 1")]
    InvalidBound { value: f64 },

    #[error("embedding failed after {attempts} attempts (best observed distortion at least {best_distortion})")]
    EmbeddingFailed { attempts: usize, best_distortion: f64 },

    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(f64),

    #[error("all points coincide")]
    AllPointsCoincide,

    #[error("pair ({0}, {1}) has source distance 0 but positive target distance")]
    RatioUndefined(usize, usize),

    #[error("m = {m} exceeds the cap of {cap}")]
    MTooLarge { m: usize, cap: usize },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("negative entry at index {0}")]
    NegativeEntry(u64),

    #[error("tail mass sum_(j>=3) x_j is zero")]
    ZeroTail,

    #[error("support bound {0} outside [3, 16]")]
    BadSupportBound(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SupportTooLarge { .. } => "SupportTooLarge",
            Error::MalformedCertificate(_) => "MalformedCertificate",
            Error::TooManyVectors { .. } => "TooManyVectors",
            Error::ZeroFamily(_) => "ZeroFamily",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::InvalidBound { .. } => "InvalidBound",
            Error::EmbeddingFailed { .. } => "EmbeddingFailed",
            Error::BadEpsilon(_) => "BadEpsilon",
            Error::AllPointsCoincide => "AllPointsCoincide",
            Error::RatioUndefined(..) => "RatioUndefined",
            Error::MTooLarge { .. } => "MTooLarge",
            Error::DomainError(_) => "DomainError",
            Error::NegativeEntry(_) => "NegativeEntry",
            Error::ZeroTail => "ZeroTail",
            Error::BadSupportBound(_) => "BadSupportBound",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}
