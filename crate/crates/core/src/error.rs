use thiserror::Error;

use crate::formula::Atom;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),

    #[error("variable `{0}` is quantified more than once")]
    DuplicateBinder(Atom),

    #[error("free variable `{0}` in matrix (not bound by the binder)")]
    FreeVariable(Atom),

    #[error("atom `{0}` is not defined by the interpretation")]
    UndefinedAtom(Atom),

    #[error("atom `{0}` has a non-classical value where a crisp one is required")]
    NonCrisp(Atom),

    #[error("invalid truth value `{0}` (expected 0, 1/2 or 1)")]
    InvalidTruthValue(String),

    #[error("malformed interpretation: {0}")]
    InvalidInterpretation(String),

    #[error("{what} has {size} variables, above the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("policy does not conform to binder {0}")]
    NonConforming(String),

    #[error("quantifier elimination needs a non-empty binder")]
    EmptyBinder,

    #[error("malformed policy document: {0}")]
    PolicyJson(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
