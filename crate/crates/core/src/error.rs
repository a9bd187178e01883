use thiserror::Error;

/// Errors raised by space, operator and tensor computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("operation requires a polyhedral space, {label} has kind {kind}")]
    NotPolyhedral { label: String, kind: String },

    #[error("polyhedral data is real-only; {0} is complex")]
    ComplexPolyhedral(String),

    #[error("guardrail exceeded: {what} = {value} > {limit}")]
    Guardrail {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("point is not on the unit sphere (norm {norm})")]
    NotOnSphere { norm: f64 },

    #[error("operator is not an endomorphism ({domain} -> {codomain})")]
    NotEndomorphism { domain: String, codomain: String },

    #[error("zero operator has no normalized ratio")]
    ZeroOperator,

    #[error("empty set: {0}")]
    EmptySet(&'static str),

    #[error("invalid polyhedral data for {label}: {reason}")]
    InvalidPolyhedron { label: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("linear program failed: {0}")]
    Lp(String),
}

pub type Result<T> = std::result::Result<T, Error>;
