use thiserror::Error;

/// Errors raised while building or combining algebraic data.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("duplicate basis symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("unknown symbol `{symbol}` in space `{space}`")]
    UnknownSymbol { space: String, symbol: String },
    #[error("index {index} out of range for space `{space}`")]
    IndexOutOfRange { space: String, index: usize },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("arity must be at least 1")]
    ZeroArity,
    #[error("space mismatch: `{expected}` vs `{got}`")]
    SpaceMismatch { expected: String, got: String },
    #[error("word key is not in canonical order: {0}")]
    NonCanonicalKey(String),
    #[error("word repeats an odd-degree letter and vanishes: {0}")]
    RepeatedOddLetter(String),
    #[error("wrong flavor: {0}")]
    FlavorMismatch(String),
    #[error("shift mismatch: {0}")]
    ShiftMismatch(String),
    #[error("bound mismatch: {0} vs {1}")]
    BoundMismatch(usize, usize),
    #[error("not a Maurer-Cartan element")]
    NotMaurerCartan,
    #[error("differential does not square to zero")]
    NotSquareZero,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
