use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate expression: {0}")]
    DegenerateExpression(String),
    #[error("numeric domain error: {0}")]
    NumericDomain(String),
    #[error("system is not orthonomic: {}", .0.join("; "))]
    NotOrthonomic(Vec<String>),
    #[error("reduction budget exceeded after {steps} steps: {detail}")]
    ReductionBudgetExceeded { steps: usize, detail: String },
    #[error("operation needs a scalar system (one dependent variable), found {0}")]
    NotScalar(usize),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("degenerate sample point: {0}")]
    DegeneratePoint(String),
    #[error("factorization does not reproduce the symbol: {0}")]
    FactorizationMismatch(String),
    #[error("symbol matrix is not diagonal: {0}")]
    NotDiagonal(String),
    #[error("singular jacobian: {0}")]
    SingularJacobian(String),
    #[error("vector fields live on different charts")]
    ChartMismatch,
    #[error("not a subdistribution: {0}")]
    NotSubdistribution(String),
    #[error("parse error at {line}:{col}: expected {expected}")]
    Parse {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("name resolution error: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
