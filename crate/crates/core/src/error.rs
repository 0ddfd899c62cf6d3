use thiserror::Error;

/// Errors raised by the parsers, evaluators and decision procedures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("negation cannot be applied to a dependence atom")]
    NegatedDependence,

    #[error("negation cannot be applied to an intuitionistic disjunction")]
    NegatedIntuitionisticDisjunction,

    #[error("formula is outside the {expected} fragment: {reason}")]
    Fragment {
        expected: &'static str,
        reason: String,
    },

    #[error("proposition symbol `{0}` is not in the domain")]
    DomainMismatch(String),

    #[error("unknown world `{0}`")]
    UnknownWorld(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("constraint is not simple (P_i must form an inclusion chain)")]
    NonSimpleConstraint,

    #[error("resource guard `{guard}` exceeded: needs {requested}, limit is {limit}")]
    Guard {
        guard: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn syntax(pos: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            pos,
            message: message.into(),
        }
    }

    pub(crate) fn guard(guard: &'static str, requested: u128, limit: u128) -> Self {
        Error::Guard {
            guard,
            requested,
            limit,
        }
    }

    /// Whether the error came from a resource guard rather than bad input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
