use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mixed exact and floating-point scalars in one expression")]
    MixedScalars,

    #[error("division by zero")]
    DivisionByZero,

    #[error("value is not real")]
    NotReal,

    #[error("not representable exactly: {0}")]
    NotExact(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("point {0} lies outside the domain")]
    OutOfDomain(String),

    #[error("function is discontinuous at breakpoint {0}; pass an explicit one-sided convention")]
    Discontinuous(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("invalid nodes: {0}")]
    InvalidNodes(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("basis check failed: {0}")]
    BasisCheck(String),

    #[error("generator basis mismatch: {0}")]
    Generators(String),

    #[error("variable {0} has no dual partner in the pairing")]
    UnpairedVariable(String),

    #[error("odd term in assembled action: {0}")]
    Parity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
