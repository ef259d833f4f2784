use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::noise::NoiseModel;
use super::{Circuit, CircuitError, Op};
use crate::code::{stabilizer_slots, CssCode, QubitLayout, Sector, Slot};

/// Which logical basis the memory experiment protects.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryBasis {
    /// Data prepared in `|0⟩`, Z checks as detectors, Z logicals observed.
    #[default]
    Z,
    X,
}

/// CX layer slots: which (sector, exponent class) each check type couples in
/// a layer. `None` exponent class means "long arm" (exponent ≥ 2).
type LayerSpec = (Option<(Sector, Option<usize>)>, Option<(Sector, Option<usize>)>);

/// Order of the eight CX layers as (X-check slot, Z-check slot).
///
/// X arms come first and Z arms last so every X/Z check pair sees its two
/// shared qubits in the same relative order, which keeps the circuit's
/// detectors deterministic. Each near layer pairs a primal with a dual target.
const SCHEDULE: [LayerSpec; 8] = [
    (Some((Sector::Primal, None)), None),
    (Some((Sector::Dual, None)), None),
    (Some((Sector::Primal, Some(0))), Some((Sector::Dual, Some(1)))),
    (Some((Sector::Dual, Some(1))), Some((Sector::Primal, Some(0)))),
    (Some((Sector::Dual, Some(0))), Some((Sector::Primal, Some(1)))),
    (Some((Sector::Primal, Some(1))), Some((Sector::Dual, Some(0)))),
    (None, Some((Sector::Primal, None))),
    (None, Some((Sector::Dual, None))),
];

fn matches(slot: &Slot, spec: (Sector, Option<usize>)) -> bool {
    slot.sector == spec.0
        && match spec.1 {
            Some(e) => slot.exponent == e,
            None => slot.exponent >= 2,
        }
}

/// Noiseless `rounds`-round memory experiment.
///
/// Each round: H on X ancillas, up to eight CX layers (empty ones skipped),
/// H on X ancillas, measure-and-reset of all ancillas. X checks use the
/// ancilla as control, Z checks use the data qubit as control.
pub fn build_syndrome_circuit(
    code: &CssCode,
    layout: &QubitLayout,
    rounds: usize,
    basis: MemoryBasis,
) -> Result<Circuit, CircuitError> {
    if rounds == 0 {
        return Err(CircuitError::NoRounds);
    }
    let slots = stabilizer_slots(code)?;
    let n = code.n;
    let nx = code.hx.rows();
    let nz = code.hz.rows();
    let x_anc: Vec<usize> = (0..nx).map(|r| layout.x_ancilla(r)).collect();
    let z_anc: Vec<usize> = (0..nz).map(|r| layout.z_ancilla(r)).collect();
    let ancillas: Vec<usize> = x_anc.iter().chain(&z_anc).copied().collect();
    let data: Vec<usize> = (0..n).collect();

    let mut layers: Vec<Vec<(usize, usize, usize)>> = Vec::new();
    for (xs, zs) in SCHEDULE {
        let mut gates = Vec::new();
        if let Some(spec) = xs {
            for (r, row) in slots.x.iter().enumerate() {
                for s in row.iter().filter(|s| matches(s, spec)) {
                    gates.push((x_anc[r], s.qubit, layout.range(x_anc[r], s.qubit)));
                }
            }
        }
        if let Some(spec) = zs {
            for (r, row) in slots.z.iter().enumerate() {
                for s in row.iter().filter(|s| matches(s, spec)) {
                    gates.push((s.qubit, z_anc[r], layout.range(z_anc[r], s.qubit)));
                }
            }
        }
        if !gates.is_empty() {
            layers.push(gates);
        }
    }

    let mut ops = Vec::new();
    match basis {
        MemoryBasis::Z => ops.push(Op::R(data.clone())),
        MemoryBasis::X => ops.push(Op::RX(data.clone())),
    }
    ops.push(Op::R(ancillas.clone()));
    ops.push(Op::Tick);

    let per_round = nx + nz;
    let (checks, tracked_offset) = match basis {
        MemoryBasis::Z => (&code.hz, nx),
        MemoryBasis::X => (&code.hx, 0),
    };
    let meas = |round: usize, check: usize| round * per_round + tracked_offset + check;
    for round in 0..rounds {
        ops.push(Op::H(x_anc.clone()));
        ops.push(Op::Tick);
        for gates in &layers {
            ops.push(Op::CX(gates.clone()));
            ops.push(Op::Tick);
        }
        ops.push(Op::H(x_anc.clone()));
        ops.push(Op::Tick);
        ops.push(Op::MR(ancillas.clone()));
        for c in 0..checks.rows() {
            let mut m = vec![meas(round, c)];
            if round > 0 {
                m.push(meas(round - 1, c));
            }
            ops.push(Op::Detector(m));
        }
        ops.push(Op::Tick);
    }

    let data_base = rounds * per_round;
    match basis {
        MemoryBasis::Z => ops.push(Op::M(data.clone())),
        MemoryBasis::X => ops.push(Op::MX(data.clone())),
    }
    for c in 0..checks.rows() {
        let mut m: Vec<usize> = checks.row(c).iter().map(|&q| data_base + q).collect();
        m.push(meas(rounds - 1, c));
        ops.push(Op::Detector(m));
    }
    let logicals = match basis {
        MemoryBasis::Z => &code.logicals_z,
        MemoryBasis::X => &code.logicals_x,
    };
    for (i, l) in logicals.iter().enumerate() {
        ops.push(Op::Observable(i, l.ones().map(|q| data_base + q).collect()));
    }

    let circuit = Circuit {
        num_qubits: layout.qubit_count(),
        rounds,
        ops,
    };
    circuit.check_layers()?;
    Ok(circuit)
}

/// Attaches the noise channels of `model` to a noiseless circuit.
///
/// Gates are followed by depolarizing channels, resets by a flip, and
/// measurements preceded by a flip. Idle qubits stay noiseless.
pub fn instrument(circuit: &Circuit, model: &NoiseModel) -> Result<Circuit, CircuitError> {
    model.validate()?;
    let mut ops = Vec::with_capacity(circuit.ops.len() * 2);
    for op in &circuit.ops {
        match op {
            Op::R(q) => {
                ops.push(op.clone());
                ops.push(Op::XErr(model.p_prep, q.clone()));
            }
            Op::RX(q) => {
                ops.push(op.clone());
                ops.push(Op::ZErr(model.p_prep, q.clone()));
            }
            Op::M(q) => {
                ops.push(Op::XErr(model.p_meas, q.clone()));
                ops.push(op.clone());
            }
            Op::MX(q) => {
                ops.push(Op::ZErr(model.p_meas, q.clone()));
                ops.push(op.clone());
            }
            Op::MR(q) => {
                ops.push(Op::XErr(model.p_meas, q.clone()));
                ops.push(op.clone());
                ops.push(Op::XErr(model.p_prep, q.clone()));
            }
            Op::H(q) => {
                ops.push(op.clone());
                ops.push(Op::Dep1(model.p1, q.clone()));
            }
            Op::CX(gates) => {
                ops.push(op.clone());
                let mut by_range: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
                for &(c, t, j) in gates {
                    by_range.entry(j).or_default().push((c, t));
                }
                for (j, pairs) in by_range {
                    ops.push(Op::Dep2(model.p2(j)?, pairs));
                }
            }
            _ => ops.push(op.clone()),
        }
    }
    Ok(Circuit {
        num_qubits: circuit.num_qubits,
        rounds: circuit.rounds,
        ops,
    })
}
