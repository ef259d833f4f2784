//! Classical seeds, hypergraph products, logical bases, layouts and distances.

mod css;
mod distance;
mod export;
mod layout;
mod logical;
mod seed;

pub use css::{hypergraph_product, CssCode, ProductOrigin};
pub use distance::{distance_bruteforce, min_logical_weight, PauliKind};
pub use export::{read_code, write_code};
pub use layout::{
    assign_layout, gate_range, stabilizer_slots, LayoutMode, QubitLayout, QubitRole, Sector,
    Slot, StabilizerSlots,
};
pub use logical::{logical_basis, symplectic_basis};
pub use seed::{build_seed, build_seed_with, Boundary, SeedCode, SeedPolynomial};

use thiserror::Error;

use crate::gf2::Gf2Error;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("seed boundaries differ: {0} vs {1}")]
    BoundaryMismatch(&'static str, &'static str),
    #[error("code was not built as a two-seed product")]
    NotAProduct,
    #[error("layout mode {mode} is incompatible with {boundary} seeds")]
    LayoutMismatch {
        mode: &'static str,
        boundary: &'static str,
    },
    #[error("expected {expected} logical pairs, found {found}")]
    LogicalCount { expected: usize, found: usize },
    #[error("H_X and H_Z do not commute")]
    NotCss,
    #[error("code file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Matrix(#[from] Gf2Error),
}
