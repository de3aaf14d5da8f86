use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("unknown element `{element}` in set `{set}`")]
    UnknownElement { set: String, element: String },

    #[error("duplicate element `{element}` in set `{set}`")]
    DuplicateElement { set: String, element: String },

    #[error("morphism is not functional: {0}")]
    NotFunctional(String),

    #[error("simulator split violated: {0}")]
    SplitViolation(String),

    #[error("no total context state exists, the compiler cannot be recovered")]
    NoTotalContext,

    #[error("simulator `{0}` is not universal")]
    NotUniversal(String),

    #[error("search budget exceeded in {what}: needs {needed} candidates, budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u64,
    },

    #[error("invalid {what}: {reason}")]
    Invalid { what: String, reason: String },
}

impl Error {
    pub(crate) fn invalid(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what: what.into(),
            reason: reason.into(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
