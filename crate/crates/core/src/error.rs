use thiserror::Error;

/// Errors produced by the basket calculus.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("malformed rational `{0}`")]
    MalformedRational(String),

    #[error("value {0} lies outside (0, 1/2]")]
    OutOfUnitHalf(String),

    #[error("empty continued fraction")]
    EmptyContinuedFraction,

    #[error("continued fraction term must be positive")]
    NonPositiveTerm,

    #[error("({b}, {r}) is an atom 1/r and has no mediant parents")]
    Atom { b: u64, r: u64 },

    #[error("pair ({b}, {r}) is not coprime")]
    NonCoprime { b: u64, r: u64 },

    #[error("pair ({b}, {r}) has slope above 1/2")]
    SlopeTooLarge { b: u64, r: u64 },

    #[error("pair ({b}, {r}) has index below 2")]
    IndexTooSmall { b: u64, r: u64 },

    #[error("lemma hypothesis failed: {0}")]
    LemmaMisuse(String),

    #[error("P_{m} is not integral (chi(mK) = {value})")]
    NonIntegralPlurigenus { m: u64, value: String },

    #[error("m = {m} is below the threshold {threshold}")]
    BelowThreshold { m: u64, threshold: u64 },

    #[error("no m <= {horizon} with P_m >= 2 for every candidate")]
    NoM0WithinHorizon { horizon: u64 },

    #[error("empty candidate set")]
    EmptyCandidateSet,

    #[error("base bound missing for ({b}, {r})")]
    MissingBaseBound { b: u64, r: u64 },

    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("certificate line {line}: {msg}")]
    Certificate { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
