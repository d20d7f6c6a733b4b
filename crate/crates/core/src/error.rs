use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("clause {0:?} is tautological")]
    Tautology(Vec<i32>),
    #[error("assignment sets variable {0} both ways")]
    InconsistentAssignment(u32),
    #[error("{vars} variables exceed the brute-force limit of {limit}")]
    LimitExceeded { vars: usize, limit: usize },
    #[error("clauses are not resolvable: {clashes} clashing literals instead of exactly one")]
    NotResolvable { clashes: usize },
    #[error("formula is not hitting")]
    NotHitting,
    #[error("model count came out negative; the input is not hitting")]
    NegativeCount,
    #[error("clauses are not a subset of the host formula")]
    NotASubset,
    #[error("search budget exhausted: {0}")]
    BudgetExceeded(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("model does not decode to a refutation: {0}")]
    DecodeInconsistency(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
