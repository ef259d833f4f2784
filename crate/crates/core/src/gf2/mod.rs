//! Exact linear algebra over the two-element field.

mod bitvec;
mod echelon;
mod matrix;

pub use bitvec::BitVector;
pub(crate) use bitvec::words_for;
pub use echelon::{coset_reduce, kernel_basis, rank, solve, RowEchelon};
pub use matrix::BinaryMatrix;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("matrix text line {line}: {message}")]
    Parse { line: usize, message: String },
}
