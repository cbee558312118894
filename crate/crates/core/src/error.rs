use thiserror::Error;

use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("not a permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("truncation exceeded: {0}")]
    Truncation(String),
    #[error("action not free in arity {arity}: {detail}")]
    ActionNotFree { arity: usize, detail: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
