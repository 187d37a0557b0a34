use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid local law: {0}")]
    InvalidLaw(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration budget exceeded: {} configurations > budget {budget}", count_text(.count))]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("bisection bracket failure at {endpoint} endpoint (parameter {param}): estimate {estimate} is on the same side of threshold {threshold} as the other endpoint")]
    BracketFailure {
        endpoint: &'static str,
        param: f64,
        estimate: f64,
        threshold: f64,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

fn count_text(count: &u128) -> String {
    if *count == u128::MAX {
        "more than 2^128".to_string()
    } else {
        count.to_string()
    }
}
