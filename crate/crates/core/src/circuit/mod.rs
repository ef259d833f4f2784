//! Syndrome-extraction circuits and their noise instrumentation.

mod build;
mod noise;
mod text;

pub use build::{build_syndrome_circuit, instrument, MemoryBasis};
pub use noise::{NoiseKind, NoiseModel, DEFAULT_RANGE_CONSTANTS};

use thiserror::Error;

use crate::code::CodeError;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("qubit {qubit} used twice in layer {layer}")]
    LayerCollision { layer: usize, qubit: usize },
    #[error("no range constant for a gate spanning {0} sites")]
    MissingRange(usize),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("rounds must be at least 1")]
    NoRounds,
    #[error("circuit line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// One circuit instruction. Measurement indices in detectors and observables
/// are absolute positions in the measurement record.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    /// Reset to `|0⟩`.
    R(Vec<usize>),
    /// Reset to `|+⟩`.
    RX(Vec<usize>),
    /// Z-basis measurement.
    M(Vec<usize>),
    /// X-basis measurement.
    MX(Vec<usize>),
    /// Z-basis measurement followed by reset to `|0⟩`.
    MR(Vec<usize>),
    H(Vec<usize>),
    /// `(control, target, range)` triples.
    CX(Vec<(usize, usize, usize)>),
    /// Single-qubit depolarizing with total probability `p`.
    Dep1(f64, Vec<usize>),
    /// Two-qubit depolarizing with total probability `p`.
    Dep2(f64, Vec<(usize, usize)>),
    XErr(f64, Vec<usize>),
    ZErr(f64, Vec<usize>),
    Detector(Vec<usize>),
    Observable(usize, Vec<usize>),
    /// Layer boundary.
    Tick,
}

impl Op {
    pub fn is_noise(&self) -> bool {
        matches!(self, Op::Dep1(..) | Op::Dep2(..) | Op::XErr(..) | Op::ZErr(..))
    }

    fn measured(&self) -> usize {
        match self {
            Op::M(q) | Op::MX(q) | Op::MR(q) => q.len(),
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub rounds: usize,
    pub ops: Vec<Op>,
}

impl Circuit {
    pub fn num_measurements(&self) -> usize {
        self.ops.iter().map(Op::measured).sum()
    }

    pub fn num_detectors(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o, Op::Detector(_)))
            .count()
    }

    pub fn num_observables(&self) -> usize {
        self.ops
            .iter()
            .filter_map(|o| match o {
                Op::Observable(i, _) => Some(i + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn two_qubit_gates(&self) -> impl Iterator<Item = &(usize, usize, usize)> {
        self.ops.iter().flat_map(|o| match o {
            Op::CX(g) => g.as_slice(),
            _ => &[],
        })
    }

    pub fn noise_channels(&self) -> impl Iterator<Item = &Op> {
        self.ops.iter().filter(|o| o.is_noise())
    }

    /// Gate layers (H or CX) between consecutive ticks, per round.
    pub fn gate_layers_per_round(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut current = 0;
        let mut layer_has_gate = false;
        for op in &self.ops {
            match op {
                Op::H(_) | Op::CX(_) => layer_has_gate = true,
                Op::Tick => {
                    current += usize::from(layer_has_gate);
                    layer_has_gate = false;
                }
                Op::MR(_) => {
                    out.push(current + usize::from(layer_has_gate));
                    current = 0;
                    layer_has_gate = false;
                }
                _ => {}
            }
        }
        out
    }

    /// Checks that no qubit is acted on by two gates inside one layer.
    pub fn check_layers(&self) -> Result<(), CircuitError> {
        let mut used = vec![false; self.num_qubits];
        let mut touched = Vec::new();
        let mut layer = 0;
        for op in &self.ops {
            let qubits: Vec<usize> = match op {
                Op::Tick => {
                    for q in touched.drain(..) {
                        used[q] = false;
                    }
                    layer += 1;
                    continue;
                }
                Op::R(q) | Op::RX(q) | Op::M(q) | Op::MX(q) | Op::MR(q) | Op::H(q) => q.clone(),
                Op::CX(g) => g.iter().flat_map(|&(c, t, _)| [c, t]).collect(),
                _ => continue,
            };
            for q in qubits {
                if used[q] {
                    return Err(CircuitError::LayerCollision { layer, qubit: q });
                }
                used[q] = true;
                touched.push(q);
            }
        }
        Ok(())
    }
}
