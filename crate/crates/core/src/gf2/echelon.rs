//! Gaussian elimination over GF(2).
//!
//! Pivots are chosen column by column from left to right, taking the
//! lowest-index unpivoted row holding a one. The reduced form is therefore a
//! pure function of the input and every derived quantity (kernel bases,
//! coset representatives, logical bases) is reproducible.

use super::bitvec::BitVector;
use super::matrix::BinaryMatrix;

/// Reduced row echelon form of a binary matrix.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    cols: usize,
    /// Nonzero reduced rows; row `i` has its pivot at `pivots[i]`.
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl RowEchelon {
    pub fn new(m: &BinaryMatrix) -> Self {
        Self::from_rows(m.cols(), m.to_dense_rows())
    }

    pub fn from_rows(cols: usize, mut rows: Vec<BitVector>) -> Self {
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..cols {
            if next == rows.len() {
                break;
            }
            let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, found);
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
        }
        rows.truncate(next);
        Self { cols, rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn reduced_rows(&self) -> &[BitVector] {
        &self.rows
    }

    /// Basis of the right null space, one vector per free column in increasing order.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVector::zeros(self.cols);
                v.set(free, true);
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if row.get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Canonical representative of `v` modulo the row space: zero on every pivot column.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut out = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out.get(p) {
                out.xor_assign(row);
            }
        }
        out
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }
}

/// Rank over GF(2).
pub fn rank(m: &BinaryMatrix) -> usize {
    RowEchelon::new(m).rank()
}

/// Basis of `{v : m·v = 0}` with `cols − rank` elements.
pub fn kernel_basis(m: &BinaryMatrix) -> Vec<BitVector> {
    RowEchelon::new(m).kernel_basis()
}

/// Any `x` with `m·x = b`, or `None` when `b` is outside the column space.
pub fn solve(m: &BinaryMatrix, b: &BitVector) -> Option<BitVector> {
    assert_eq!(b.len(), m.rows(), "right-hand side length must equal row count");
    let cols = m.cols();
    // Augment with b as an extra trailing column; pivots are never taken on it.
    let rows: Vec<BitVector> = (0..m.rows())
        .map(|r| {
            let mut v = BitVector::from_positions(cols + 1, m.row(r).iter().copied());
            if b.get(r) {
                v.set(cols, true);
            }
            v
        })
        .collect();
    let mut echelon = RowEchelon::from_rows(cols + 1, rows);
    if echelon.pivots.last() == Some(&cols) {
        return None;
    }
    // A row reduced to just the augmented bit has no pivot among the first `cols` columns.
    echelon.pivots.retain(|&p| p < cols);
    let mut x = BitVector::zeros(cols);
    for (row, &p) in echelon.rows.iter().zip(&echelon.pivots) {
        if row.get(cols) {
            x.set(p, true);
        }
    }
    Some(x)
}

/// Canonical representative of `v` modulo the row space of `rowspace_of`.
pub fn coset_reduce(v: &BitVector, rowspace_of: &BinaryMatrix) -> BitVector {
    assert_eq!(v.len(), rowspace_of.cols(), "vector length must equal column count");
    RowEchelon::new(rowspace_of).reduce(v)
}
