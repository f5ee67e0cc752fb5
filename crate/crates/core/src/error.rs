use thiserror::Error;

/// Every failure the engine can surface. Computational aborts are never
/// papered over: the caller decides whether to resample a context.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("higher-order pole at s1 = 0 (order {0})")]
    HigherOrderPole(usize),
    #[error("log of non-unital series")]
    LogNonUnital,
    #[error("exp of series with nonzero constant term")]
    ExpNonNilpotent,
    #[error("series order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("self-dual zero weight with multiplicity {0}")]
    SelfDualZeroWeight(i64),
    #[error("not self-dual: {0}")]
    NotSelfDual(String),
    #[error("division by zero weight {0} -- regenerate context")]
    ZeroWeight(String),
    #[error("sign family insufficient -- extend family")]
    SignFamilyInsufficient,
    #[error("sign rule survivors disagree on validation partition {0}")]
    SignSurvivorsDisagree(String),
    #[error("invalid topological data: {0}")]
    InvalidTopologicalData(String),
    #[error("non-generic context: {0}")]
    NonGenericContext(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("size {0} exceeds supported maximum {1}")]
    SizeTooLarge(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
