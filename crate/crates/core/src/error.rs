use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base must be at least 2, got {0}")]
    BaseTooSmall(i64),
    #[error("expected {expected} digits for base {expected}, got {got}")]
    WrongDigitCount { expected: usize, got: usize },
    #[error("duplicate digit {0}")]
    DuplicateDigit(i64),
    #[error("level {level} too large for exact arithmetic (largest safe level is {safe_max})")]
    LevelTooLarge { level: u32, safe_max: u32 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("set has {got} elements but base is {base}")]
    CardinalityMismatch { base: i64, got: usize },
    #[error("{0} is not a stabilization exponent")]
    NotStabilizing(u32),
    #[error("summands do not form a complete residue system modulo {0}")]
    NotCompleteResidues(i64),
    #[error("generated digits collide at {0}")]
    GeneratedCollision(i64),
    #[error("lifted decomposition failed verification against the expanded digits")]
    LiftVerification,
    #[error("decomposition does not verify against its digit set")]
    InvalidDecomposition,
    #[error("(T1)/(T2) fail for {0:?}")]
    CovenMeyerowitz(Vec<i64>),
    #[error("{part} fails (T1)/(T2): {set:?}")]
    PartFailsCovenMeyerowitz { part: String, set: Vec<i64> },
    #[error("B_{index} has a different cyclotomic support from B_0")]
    SupportMismatch { index: usize },
    #[error("{factor} times the spectrum of {part} is not integral")]
    NonIntegralSpectrum { part: String, factor: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
