use thiserror::Error;

/// Errors raised by ring arithmetic, presentations and the verification drivers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a unit of {1}")]
    NotUnit(String, String),
    #[error("{0} is not an element of {1}")]
    NotMember(String, String),
    #[error("the valuation of zero is undefined")]
    ZeroValuation,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// Errors caused by the caller handing over data that is not a unit (or
    /// not in the ring), as opposed to malformed input or internal limits.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::NotUnit(..) | Error::NotMember(..) | Error::ZeroValuation | Error::DivisionByZero | Error::Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
