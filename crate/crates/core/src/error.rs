use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter {0} must be non-zero")]
    ZeroS(&'static str),
    #[error("t1 and t2 must both be zero or both be non-zero")]
    MismatchedT,
    #[error(
        "branch condition sqrt(s^2) = s fails for {0} only; negating a single s-band is not a similarity of the s-band alone"
    )]
    SingleBranchFlip(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("exponent p = {0} outside [1, inf)")]
    InvalidExponent(f64),
    #[error("lambda equals a diagonal value r1 or r2")]
    DegenerateLambda,
    #[error("companion matrix C requires t1 t2 != 0")]
    ZeroT,
    #[error("lambda is not in the point spectrum of the adjoint")]
    NotAdjointEigenvalue,
    #[error("lambda must equal r1 or r2 for a kernel check")]
    NotDiagonalValue,
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("sequence tail is identically zero")]
    ZeroTail,
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("parse error: {0}")]
    Parse(String),
}
