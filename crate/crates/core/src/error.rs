use thiserror::Error;

/// Every failure the library can report. Variant names are surfaced verbatim by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("PrimeError: {0} is not a prime")]
    Prime(u64),

    #[error("LevelError: level must be >= 1, got {0}")]
    Level(i64),

    #[error("UnitError: {value} is not a unit modulo {modulus}")]
    Unit { value: u64, modulus: u64 },

    #[error("ZeroError: valuation of zero is undefined ({0})")]
    Zero(String),

    #[error("PrecisionError: {0}")]
    Precision(String),

    #[error("OrderError: root-of-unity order must be >= 1, got {0}")]
    Order(i64),

    #[error("IllDefinedSumError: {0}")]
    IllDefinedSum(String),

    #[error("PoleError: L-factor has a pole ({0})")]
    Pole(String),

    #[error("PreconditionError: {0}")]
    Precondition(String),

    #[error("SearchFailure: {0}")]
    SearchFailure(String),

    #[error("ZeroJacobiError: J_1 vanishes ({0})")]
    ZeroJacobi(String),

    #[error("ScaleError: group order {order} exceeds desk-scale guard {limit} (use --force or EPSLAB_MAX_GROUP)")]
    Scale { order: u64, limit: u64 },

    #[error("ParseError: {0}")]
    Parse(String),

    #[error("DivisionByZero: {0}")]
    DivisionByZero(String),

    #[error("IoError: {msg}")]
    Io { kind: std::io::ErrorKind, msg: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io { kind: e.kind(), msg: e.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
