use thiserror::Error;

use crate::store::EndId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("option {0} is not in the store")]
    InvalidOption(EndId),

    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },

    #[error("game at byte {offset} has Left options; only Left dead ends are accepted")]
    NotALeftEnd { offset: usize },

    #[error("operation needs a non-zero game")]
    ZeroGame,

    #[error("game {0} is not an atom")]
    NotAnAtom(String),

    #[error("closed form for flex({g} + {h}) gives {expected}, recursion gives {actual}")]
    ClosedFormMismatch {
        g: String,
        h: String,
        expected: u32,
        actual: u32,
    },

    #[error("resource budget exceeded during {stage}: {progress}")]
    Overflow { stage: String, progress: String },

    #[error("snapshot: {0}")]
    Snapshot(String),
}

pub type Result<T> = std::result::Result<T, Error>;
