//! Pauli-frame sampling and detector error model extraction.

mod batch;
mod dem;
mod frame;

pub use batch::ShotBatch;
pub use dem::{extract_dem, DetectorErrorModel, Mechanism};
pub use frame::{fault_sites, inject_fault, sample, sample_with, FaultSite, Pauli};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("detectors or observables depend on random measurement outcomes (first offending bit {0})")]
    NonDeterministic(usize),
    #[error("merged prior {0} exceeds 0.5")]
    PriorTooLarge(f64),
    #[error("shots must be at least 1")]
    NoShots,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `q₁(1−q₂) + q₂(1−q₁)`: probability that exactly one of two independent
/// events fires.
pub fn xor_probability(q1: f64, q2: f64) -> f64 {
    q1 * (1.0 - q2) + q2 * (1.0 - q1)
}
