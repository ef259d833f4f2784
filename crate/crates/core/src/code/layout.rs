use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::css::CssCode;
use super::seed::Boundary;
use super::CodeError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayoutMode {
    #[serde(alias = "pbc")]
    Periodic,
    #[serde(alias = "obc")]
    Open,
    /// Open layout with empty lattice rows and columns removed.
    #[serde(alias = "squeezed-obc")]
    SqueezedOpen,
}

impl LayoutMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LayoutMode::Periodic => "pbc",
            LayoutMode::Open => "obc",
            LayoutMode::SqueezedOpen => "squeezed-obc",
        }
    }
}

impl std::str::FromStr for LayoutMode {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pbc" | "periodic" => Ok(LayoutMode::Periodic),
            "obc" | "open" => Ok(LayoutMode::Open),
            "squeezed-obc" | "squeezed" | "squeezedobc" => Ok(LayoutMode::SqueezedOpen),
            other => Err(CodeError::Parse {
                line: 0,
                message: format!("unknown layout mode `{other}`"),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QubitRole {
    Data,
    AncillaX,
    AncillaZ,
}

/// Lattice positions for data qubits `0..N`, then X ancillas, then Z ancillas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitLayout {
    pub mode: LayoutMode,
    pub coords: Vec<(i64, i64)>,
    pub roles: Vec<QubitRole>,
    /// Torus periods along x and y for periodic layouts.
    pub period: Option<(i64, i64)>,
    pub n_data: usize,
    pub n_x: usize,
    pub n_z: usize,
}

impl QubitLayout {
    pub fn qubit_count(&self) -> usize {
        self.coords.len()
    }

    pub fn x_ancilla(&self, row: usize) -> usize {
        self.n_data + row
    }

    pub fn z_ancilla(&self, row: usize) -> usize {
        self.n_data + self.n_x + row
    }

    pub fn ancillas(&self) -> std::ops::Range<usize> {
        self.n_data..self.coords.len()
    }

    pub fn range(&self, a: usize, b: usize) -> usize {
        let (xa, ya) = self.coords[a];
        let (xb, yb) = self.coords[b];
        let mut dx = (xa - xb).abs();
        let mut dy = (ya - yb).abs();
        if let Some((px, py)) = self.period {
            dx = dx.min(px - dx);
            dy = dy.min(py - dy);
        }
        dx.max(dy) as usize
    }

    /// Bounding box `(width, height)` of occupied sites.
    pub fn extent(&self) -> (i64, i64) {
        let xs = self.coords.iter().map(|c| c.0);
        let ys = self.coords.iter().map(|c| c.1);
        let w = xs.clone().max().unwrap_or(0) - xs.min().unwrap_or(0) + 1;
        let h = ys.clone().max().unwrap_or(0) - ys.min().unwrap_or(0) + 1;
        (w, h)
    }

    pub fn coordinates_unique(&self) -> bool {
        let mut seen = self.coords.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

/// Chebyshev separation in lattice sites, with minimum image on a torus.
pub fn gate_range(layout: &QubitLayout, a: usize, b: usize) -> usize {
    layout.range(a, b)
}

/// Places primal qubit `(i, j)` at `(2i, 2j)`, dual `(a, b)` at `(2a+1, 2b+1)`,
/// X check `(a, j)` at `(2a+1, 2j)` and Z check `(i, b)` at `(2i, 2b+1)`.
///
/// Each ancilla then touches its four lattice neighbours plus one horizontal
/// and one vertical arm of length `2k − 1`.
pub fn assign_layout(code: &CssCode, mode: LayoutMode) -> Result<QubitLayout, CodeError> {
    let origin = code.origin.as_ref().ok_or(CodeError::NotAProduct)?;
    let boundary = origin.boundary();
    let compatible = matches!(
        (mode, boundary),
        (LayoutMode::Periodic, Boundary::Periodic)
            | (LayoutMode::Open | LayoutMode::SqueezedOpen, Boundary::Open)
    );
    if !compatible {
        return Err(CodeError::LayoutMismatch {
            mode: mode.as_str(),
            boundary: boundary.as_str(),
        });
    }
    let (n1, r1) = (origin.vertical.n, origin.vertical.r);
    let (n2, r2) = (origin.horizontal.n, origin.horizontal.r);
    let mut coords = Vec::with_capacity(code.n + code.hx.rows() + code.hz.rows());
    let mut roles = Vec::with_capacity(coords.capacity());
    for i in 0..n1 {
        for j in 0..n2 {
            coords.push((2 * i as i64, 2 * j as i64));
        }
    }
    for a in 0..r1 {
        for b in 0..r2 {
            coords.push((2 * a as i64 + 1, 2 * b as i64 + 1));
        }
    }
    roles.resize(coords.len(), QubitRole::Data);
    for a in 0..r1 {
        for j in 0..n2 {
            coords.push((2 * a as i64 + 1, 2 * j as i64));
            roles.push(QubitRole::AncillaX);
        }
    }
    for i in 0..n1 {
        for b in 0..r2 {
            coords.push((2 * i as i64, 2 * b as i64 + 1));
            roles.push(QubitRole::AncillaZ);
        }
    }
    let period = match mode {
        LayoutMode::Periodic => Some((2 * n1 as i64, 2 * n2 as i64)),
        _ => None,
    };
    if mode == LayoutMode::SqueezedOpen {
        squeeze(&mut coords);
    }
    Ok(QubitLayout {
        mode,
        coords,
        roles,
        period,
        n_data: code.n,
        n_x: code.hx.rows(),
        n_z: code.hz.rows(),
    })
}

/// Relabels each axis by the rank of its occupied values, deleting empty lines.
fn squeeze(coords: &mut [(i64, i64)]) {
    let rank = |vals: Vec<i64>| -> BTreeMap<i64, i64> {
        let mut v = vals;
        v.sort_unstable();
        v.dedup();
        v.into_iter().enumerate().map(|(i, x)| (x, i as i64)).collect()
    };
    let xs = rank(coords.iter().map(|c| c.0).collect());
    let ys = rank(coords.iter().map(|c| c.1).collect());
    for c in coords.iter_mut() {
        *c = (xs[&c.0], ys[&c.1]);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    Primal,
    Dual,
}

/// One data qubit in a check's support, tagged by which block it lives in and
/// which seed exponent produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub qubit: usize,
    pub sector: Sector,
    pub exponent: usize,
}

#[derive(Clone, Debug)]
pub struct StabilizerSlots {
    pub x: Vec<Vec<Slot>>,
    pub z: Vec<Vec<Slot>>,
}

/// Per-check support with exponent labels, derived from the seed structure.
pub fn stabilizer_slots(code: &CssCode) -> Result<StabilizerSlots, CodeError> {
    let o = code.origin.as_ref().ok_or(CodeError::NotAProduct)?;
    let (n1, r1) = (o.vertical.n, o.vertical.r);
    let (n2, r2) = (o.horizontal.n, o.horizontal.r);
    let periodic = o.boundary() == Boundary::Periodic;
    // Position `base + e` in a seed of length `len`, or `base − e`.
    let fwd = |base: usize, e: usize, len: usize| -> Option<usize> {
        if periodic {
            Some((base + e) % len)
        } else {
            (base + e < len).then_some(base + e)
        }
    };
    let back = |base: usize, e: usize, len: usize, rows: usize| -> Option<usize> {
        if periodic {
            Some((base + len - e % len) % len)
        } else {
            base.checked_sub(e).filter(|&x| x < rows)
        }
    };
    let e1 = o.vertical.poly.exponents();
    let e2 = o.horizontal.poly.exponents();

    let mut x = vec![Vec::new(); code.hx.rows()];
    for a in 0..r1 {
        for j in 0..n2 {
            let row = &mut x[o.x_check_index(a, j)];
            for &e in e1 {
                if let Some(i) = fwd(a, e, n1) {
                    row.push(slot(o.primal_index(i, j), Sector::Primal, e));
                }
            }
            for &e in e2 {
                if let Some(b) = back(j, e, n2, r2) {
                    row.push(slot(o.dual_index(a, b), Sector::Dual, e));
                }
            }
        }
    }
    let mut z = vec![Vec::new(); code.hz.rows()];
    for i in 0..n1 {
        for b in 0..r2 {
            let row = &mut z[o.z_check_index(i, b)];
            for &e in e2 {
                if let Some(j) = fwd(b, e, n2) {
                    row.push(slot(o.primal_index(i, j), Sector::Primal, e));
                }
            }
            for &e in e1 {
                if let Some(a) = back(i, e, n1, r1) {
                    row.push(slot(o.dual_index(a, b), Sector::Dual, e));
                }
            }
        }
    }
    Ok(StabilizerSlots { x, z })
}

fn slot(qubit: usize, sector: Sector, exponent: usize) -> Slot {
    Slot {
        qubit,
        sector,
        exponent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_seed, hypergraph_product};

    fn code(n: usize, k: usize, b: Boundary) -> CssCode {
        let s = build_seed(n, k, b).unwrap();
        hypergraph_product(&s, &s).unwrap()
    }

    #[test]
    fn slots_match_check_matrices() {
        for (n, k, b) in [
            (3, 1, Boundary::Open),
            (7, 3, Boundary::Open),
            (6, 2, Boundary::Periodic),
            (9, 4, Boundary::Periodic),
        ] {
            let c = code(n, k, b);
            let s = stabilizer_slots(&c).unwrap();
            for (r, row) in s.x.iter().enumerate() {
                let mut q: Vec<_> = row.iter().map(|s| s.qubit).collect();
                q.sort_unstable();
                assert_eq!(q, c.hx.row(r), "x row {r}");
            }
            for (r, row) in s.z.iter().enumerate() {
                let mut q: Vec<_> = row.iter().map(|s| s.qubit).collect();
                q.sort_unstable();
                assert_eq!(q, c.hz.row(r), "z row {r}");
            }
        }
    }

    #[test]
    fn surface_code_is_nearest_neighbour() {
        let c = code(3, 1, Boundary::Open);
        let l = c.layout.as_ref().unwrap();
        assert!(l.coordinates_unique());
        assert_eq!(l.extent(), (5, 5));
        for (r, row) in c.hx.row_supports().iter().enumerate() {
            for &q in row {
                assert_eq!(l.range(l.x_ancilla(r), q), 1);
            }
        }
    }

    #[test]
    fn bulk_k3_arms() {
        let c = code(7, 3, Boundary::Open);
        let l = c.layout.as_ref().unwrap();
        let s = stabilizer_slots(&c).unwrap();
        let mut bulk = 0;
        for (r, row) in s.x.iter().enumerate() {
            if row.len() < 6 {
                continue;
            }
            bulk += 1;
            let mut ranges: Vec<_> = row.iter().map(|s| l.range(l.x_ancilla(r), s.qubit)).collect();
            ranges.sort_unstable();
            assert_eq!(ranges, vec![1, 1, 1, 1, 5, 5]);
        }
        assert!(bulk > 0);
    }

    #[test]
    fn squeezed_layout_is_square_and_shorter() {
        let c = code(7, 3, Boundary::Open);
        let open = c.layout.clone().unwrap();
        let sq = assign_layout(&c, LayoutMode::SqueezedOpen).unwrap();
        assert_eq!(open.extent(), (13, 13));
        assert_eq!(sq.extent(), (11, 11));
        assert!(sq.coordinates_unique());
        let s = stabilizer_slots(&c).unwrap();
        let mut shorter = 0;
        let mut max_open = 0;
        let mut max_sq = 0;
        for (r, row) in s.x.iter().enumerate() {
            for sl in row {
                let a = open.range(open.x_ancilla(r), sl.qubit);
                let b = sq.range(sq.x_ancilla(r), sl.qubit);
                assert!(b <= a);
                shorter += usize::from(b < a);
                max_open = max_open.max(a);
                max_sq = max_sq.max(b);
            }
        }
        assert!(shorter > 0);
        assert!(max_sq <= max_open);
    }

    #[test]
    fn periodic_uses_minimum_image() {
        let c = code(6, 2, Boundary::Periodic);
        let l = c.layout.as_ref().unwrap();
        let s = stabilizer_slots(&c).unwrap();
        for (r, row) in s.z.iter().enumerate() {
            for sl in row {
                let d = l.range(l.z_ancilla(r), sl.qubit);
                let expected = if sl.exponent < 2 { 1 } else { 3 };
                assert_eq!(d, expected);
            }
        }
    }

    #[test]
    fn mode_must_match_boundary() {
        let c = code(6, 2, Boundary::Periodic);
        assert!(assign_layout(&c, LayoutMode::Open).is_err());
    }
}
