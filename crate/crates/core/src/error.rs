use thiserror::Error;

use crate::tree::Color;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid rational literal `{0}`")]
    Rational(String),

    #[error("entry ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },

    #[error("shape mismatch: {left:?} against {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },

    #[error("malformed permutation {0:?}")]
    Permutation(Vec<usize>),

    #[error("invalid corolla {family}{arity}: {reason}")]
    Corolla { family: &'static str, arity: usize, reason: &'static str },

    #[error("color mismatch at {location}: expected {expected}, found {found}")]
    ColorMismatch { location: String, expected: Color, found: Color },

    #[error("slot {slot} out of range for a tree with {arity} leaves")]
    SlotOutOfRange { slot: usize, arity: usize },

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("arity {arity} exceeds the configured cap {cap} for {what}")]
    ArityCap { what: String, arity: usize, cap: usize },

    #[error("inconsistent signs for ∂▼{arity}: {detail}")]
    InconsistentSigns { arity: usize, detail: String },

    #[error("graded map error: {0}")]
    Graded(String),

    #[error("structure file error: {0}")]
    Structure(String),
}
