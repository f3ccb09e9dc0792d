use thiserror::Error;

/// Errors raised by the descent engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument violates the operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request exceeds a configured enumeration limit.
    #[error("capacity exceeded: {what} = {requested} exceeds limit {limit}")]
    Capacity {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    /// A bound or check whose hypotheses do not hold for the arguments.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// An identity that must hold by construction failed.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn not_applicable(msg: impl Into<String>) -> Self {
        Error::NotApplicable(msg.into())
    }

    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
