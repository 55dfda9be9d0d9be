use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("matrix is not self-adjoint (residual {residual:e})")]
    NotSelfAdjoint { residual: f64 },
    #[error("matrix {index} is not normal (residual {residual:e})")]
    NotNormal { index: usize, residual: f64 },
    #[error("matrices {first} and {second} do not commute (residual {residual:e})")]
    NotCommuting {
        first: usize,
        second: usize,
        residual: f64,
    },
    #[error("joint diagonalization failed verification after retries (residual {residual:e})")]
    JointDiagonalization { residual: f64 },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("closure did not converge after {0} iterations")]
    ClosureDidNotConverge(usize),
    #[error("Schur iteration did not converge within {0} steps")]
    SchurDidNotConverge(usize),
    #[error("category is not commutative (block {object}, residual {residual:e})")]
    NotCommutative { object: String, residual: f64 },
    #[error("category is not full (block {a}:{b})")]
    NotFull { a: String, b: String },
    #[error("category is not unital")]
    NotUnital,
    #[error("object {object} has {found} spectrum points, expected {expected}")]
    FullnessMismatch {
        object: String,
        found: usize,
        expected: usize,
    },
    #[error("ambiguous fiber matching in block {a}:{b}: {detail}")]
    AmbiguousMatching { a: String, b: String, detail: String },
    #[error("category is not one-dimensional (block {a}:{b} has dimension {dim})")]
    NotOneDimensional { a: String, b: String, dim: usize },
    #[error("invalid *-functor: {0}")]
    InvalidFunctor(String),
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("invalid spaceoid: {0}")]
    InvalidSpaceoid(String),
    #[error("invalid phase functor: {0}")]
    InvalidPhaseFunctor(String),
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("spectrum mismatch: {0}")]
    SpectrumMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
