use thiserror::Error;

/// Errors raised by constructions, certification and file handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no prime in [{lo}, {hi}]")]
    NoPrimeInRange { lo: u64, hi: u64 },

    #[error("requested {count} polynomials but the family only has {family}")]
    CountExceedsFamily { count: u64, family: u64 },

    #[error("invalid modulus {0}: expected a prime p >= 3")]
    InvalidModulus(u64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("entry ({row}, {col}) is not unimodular")]
    NotUnimodular { row: usize, col: usize },

    #[error("too many columns: {cols} > {max}")]
    TooManyColumns { cols: usize, max: usize },

    #[error("zero vector")]
    ZeroVector,

    #[error("column {0} is identically zero")]
    ZeroColumn(usize),

    #[error("row {0} is identically zero")]
    ZeroRow(usize),

    #[error("entry ({row}, {col}) is not +1 or -1")]
    NotSignMatrix { row: usize, col: usize },

    #[error(
        "no certified draw after {rounds} rounds (best round {best_round}: \
         pair sum {max_pair_sum}, quadruple sum {max_quad_sum}, threshold {threshold})"
    )]
    RoundsExhausted {
        rounds: u64,
        best_round: u64,
        max_pair_sum: i64,
        max_quad_sum: i64,
        threshold: f64,
    },

    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("explicit distribution tensor only available for k = 1, got k = {0}")]
    UnsupportedK(u32),

    #[error("invalid point set: {0}")]
    InvalidPointSet(String),

    #[error("epsilon {0} out of range (must be <= 1/2)")]
    EpsilonOutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
