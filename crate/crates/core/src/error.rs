use thiserror::Error;

/// Errors shared by every module of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Arguments outside the operation's domain: bad indices, mismatched signatures.
    #[error("domain error: {0}")]
    Domain(String),

    /// A required object does not exist (no copy, no embedding).
    #[error("not found: {0}")]
    NotFound(String),

    /// An exhaustive search would exceed its configured budget.
    #[error("budget exceeded: {what} needs {cost} but the budget is {budget}")]
    Budget {
        what: String,
        cost: u128,
        budget: u128,
    },

    /// Input failed a validation rule; `clause` names the violated rule.
    #[error("validation failed ({clause}): {detail}")]
    Validation { clause: String, detail: String },

    /// Text input could not be parsed.
    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    /// A stabilisation guard did not settle within the given depth.
    #[error("unresolved: {0}")]
    Unresolved(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn budget(what: impl Into<String>, cost: u128, budget: u128) -> Self {
        Error::Budget {
            what: what.into(),
            cost,
            budget,
        }
    }

    pub(crate) fn validation(clause: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Validation {
            clause: clause.into(),
            detail: detail.into(),
        }
    }
}
