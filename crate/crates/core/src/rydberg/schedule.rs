use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::RydbergError;
use crate::code::{stabilizer_slots, CssCode, QubitLayout, Sector};

/// Stabilizer groups measured one after another; all ancillas in a group
/// run their gates in parallel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    /// Side of the square subregions in lattice sites.
    pub cell: i64,
    /// Ancilla qubit indices per group. Group `g` collects the ancillas whose
    /// coordinates share one residue pair modulo `cell`.
    pub groups: Vec<Vec<usize>>,
}

/// Tiles the lattice with `2(k+1) × 2(k+1)` subregions and puts ancillas at
/// the same position within their subregion into one group, giving
/// `2(k+1)²` groups.
pub fn parallel_schedule(layout: &QubitLayout, k: usize) -> Result<Schedule, RydbergError> {
    let cell = 2 * (k as i64 + 1);
    let mut class = BTreeMap::new();
    for rx in 0..cell {
        for ry in 0..cell {
            if (rx + ry) % 2 == 1 {
                let id = class.len();
                class.insert((rx, ry), id);
            }
        }
    }
    let mut groups = vec![Vec::new(); class.len()];
    for q in layout.ancillas() {
        let (x, y) = layout.coords[q];
        let key = (x.rem_euclid(cell), y.rem_euclid(cell));
        let g = class.get(&key).ok_or_else(|| {
            RydbergError::InvalidConfig(format!("ancilla {q} at ({x}, {y}) is off the checkerboard"))
        })?;
        groups[*g].push(q);
    }
    Ok(Schedule { cell, groups })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub groups: usize,
    pub nonempty_groups: usize,
    /// Every ancilla appears in exactly one group.
    pub covers_all: bool,
    pub max_gate_range: usize,
    /// Smallest distance between two ancillas of one group.
    pub min_ancilla_separation: Option<usize>,
    /// Two ancillas of one group touch the same data qubit.
    pub shares_atoms: bool,
    /// Smallest distance between atoms of two gates run in the same layer.
    pub min_pair_separation: Option<usize>,
}

impl ScheduleReport {
    /// Simultaneous ancillas lie beyond the longest gate and use disjoint atoms.
    pub fn blockade_safe(&self) -> bool {
        self.covers_all
            && !self.shares_atoms
            && self.min_ancilla_separation.is_none_or(|s| s > self.max_gate_range)
    }
}

pub fn verify_schedule(
    code: &CssCode,
    layout: &QubitLayout,
    schedule: &Schedule,
) -> Result<ScheduleReport, RydbergError> {
    let slots = stabilizer_slots(code).map_err(|e| RydbergError::InvalidConfig(e.to_string()))?;
    // Ancilla qubit → (check type, row).
    let mut support: BTreeMap<usize, Vec<(u8, Sector, usize, usize)>> = BTreeMap::new();
    for (r, row) in slots.x.iter().enumerate() {
        let a = layout.x_ancilla(r);
        support.insert(a, row.iter().map(|s| (0, s.sector, s.exponent, s.qubit)).collect());
    }
    for (r, row) in slots.z.iter().enumerate() {
        let a = layout.z_ancilla(r);
        support.insert(a, row.iter().map(|s| (1, s.sector, s.exponent, s.qubit)).collect());
    }
    let mut seen = vec![0usize; layout.qubit_count()];
    for g in &schedule.groups {
        for &a in g {
            seen[a] += 1;
        }
    }
    let covers_all = layout.ancillas().all(|a| seen[a] == 1);
    let max_gate_range = support
        .iter()
        .flat_map(|(&a, s)| s.iter().map(move |t| layout.range(a, t.3)))
        .max()
        .unwrap_or(0);

    let mut min_anc: Option<usize> = None;
    let mut min_pair: Option<usize> = None;
    let mut shares_atoms = false;
    for g in &schedule.groups {
        for (i, &a) in g.iter().enumerate() {
            for &b in &g[i + 1..] {
                let d = layout.range(a, b);
                min_anc = Some(min_anc.map_or(d, |m| m.min(d)));
                let sa = &support[&a];
                let sb = &support[&b];
                shares_atoms |= sa.iter().any(|s| sb.iter().any(|t| s.3 == t.3));
                for s in sa {
                    for t in sb.iter().filter(|t| (t.0, t.1, t.2) == (s.0, s.1, s.2)) {
                        let d = [
                            layout.range(a, b),
                            layout.range(a, t.3),
                            layout.range(s.3, b),
                            layout.range(s.3, t.3),
                        ]
                        .into_iter()
                        .min()
                        .unwrap();
                        min_pair = Some(min_pair.map_or(d, |m| m.min(d)));
                    }
                }
            }
        }
    }
    Ok(ScheduleReport {
        groups: schedule.groups.len(),
        nonempty_groups: schedule.groups.iter().filter(|g| !g.is_empty()).count(),
        covers_all,
        max_gate_range,
        min_ancilla_separation: min_anc,
        shares_atoms,
        min_pair_separation: min_pair,
    })
}
