use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0} is not a prime below 2^64")]
    NotPrime(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the disk of convergence: {0}")]
    Domain(String),

    #[error("truncation order mismatch: {0}")]
    Order(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("insufficient data: need a prefix of length {needed}, have {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("invalid selector target: {0}")]
    InvalidTarget(String),

    #[error("conditioning on an event of zero frequency at N = {0}")]
    ConditioningOnNull(u64),

    #[error("range error: {0}")]
    Range(String),

    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    #[error("digit {digit} out of range for base {base}")]
    DigitRange { digit: u64, base: u64 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("continuous map has no oscillation bound: {0}")]
    OscillationMissing(String),

    #[error("pieces of a step function overlap: {0}")]
    OverlappingPieces(String),

    #[error("group context has no ring multiplication")]
    NoRingStructure,

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("critical region is not significant: {0}")]
    RegionNotSignificant(String),

    #[error("not a field of sets: {0}")]
    NotAField(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::NotPrime(_)
            | Error::InvalidParameter(_)
            | Error::InvalidTarget(_)
            | Error::DigitRange { .. }
            | Error::AlphabetMismatch(_) => 2,
            Error::HypothesisViolation(_) => 3,
            Error::InsufficientData { .. } => 4,
            Error::Domain(_) | Error::Order(_) | Error::PrecisionExhausted(_) => 5,
            Error::ConditioningOnNull(_) => 6,
            Error::Range(_) => 7,
            Error::OverlappingPieces(_) => 8,
            Error::NoRingStructure => 9,
            Error::NotInvertible(_) => 10,
            Error::RegionNotSignificant(_) => 11,
            Error::NotAField(_) => 12,
            Error::OscillationMissing(_) => 13,
            Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
