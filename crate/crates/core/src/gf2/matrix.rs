use std::fmt::Write as _;

use super::bitvec::BitVector;
use super::Gf2Error;

/// Sparse binary matrix stored as sorted column supports per row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    supports: Vec<Vec<usize>>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            supports: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            supports: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// Builds a matrix from `(row, col)` positions; rejects out-of-range and repeated positions.
    pub fn new(
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, Gf2Error> {
        let mut supports = vec![Vec::new(); rows];
        for (r, c) in entries {
            if r >= rows || c >= cols {
                return Err(Gf2Error::OutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            supports[r].push(c);
        }
        for (r, s) in supports.iter_mut().enumerate() {
            s.sort_unstable();
            if let Some(w) = s.windows(2).find(|w| w[0] == w[1]) {
                return Err(Gf2Error::DuplicateEntry { row: r, col: w[0] });
            }
        }
        Ok(Self {
            rows,
            cols,
            supports,
        })
    }

    /// Builds a matrix from per-row supports. Supports are sorted; duplicates are rejected.
    pub fn from_row_supports(
        rows: usize,
        cols: usize,
        supports: Vec<Vec<usize>>,
    ) -> Result<Self, Gf2Error> {
        assert_eq!(supports.len(), rows, "support count must equal row count");
        Self::new(
            rows,
            cols,
            supports
                .into_iter()
                .enumerate()
                .flat_map(|(r, s)| s.into_iter().map(move |c| (r, c))),
        )
    }

    pub fn from_dense_rows(cols: usize, rows: &[BitVector]) -> Self {
        let supports = rows
            .iter()
            .map(|r| {
                debug_assert_eq!(r.len(), cols);
                r.ones().collect()
            })
            .collect();
        Self {
            rows: rows.len(),
            cols,
            supports,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[usize] {
        &self.supports[r]
    }

    pub fn row_supports(&self) -> &[Vec<usize>] {
        &self.supports
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.supports[r].binary_search(&c).is_ok()
    }

    pub fn nnz(&self) -> usize {
        self.supports.iter().map(Vec::len).sum()
    }

    /// All nonzero positions in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.supports
            .iter()
            .enumerate()
            .flat_map(|(r, s)| s.iter().map(move |&c| (r, c)))
    }

    pub fn dense_row(&self, r: usize) -> BitVector {
        BitVector::from_positions(self.cols, self.supports[r].iter().copied())
    }

    pub fn to_dense_rows(&self) -> Vec<BitVector> {
        (0..self.rows).map(|r| self.dense_row(r)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut supports = vec![Vec::new(); self.cols];
        for (r, c) in self.entries() {
            supports[c].push(r);
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            supports,
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &BinaryMatrix) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut supports = Vec::with_capacity(rows);
        for a in &self.supports {
            for b in &other.supports {
                let mut s = Vec::with_capacity(a.len() * b.len());
                for &ca in a {
                    for &cb in b {
                        s.push(ca * other.cols + cb);
                    }
                }
                supports.push(s);
            }
        }
        Self {
            rows,
            cols,
            supports,
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &BinaryMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let supports = self
            .supports
            .iter()
            .zip(&other.supports)
            .map(|(a, b)| {
                a.iter()
                    .copied()
                    .chain(b.iter().map(|&c| c + self.cols))
                    .collect()
            })
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols + other.cols,
            supports,
        }
    }

    pub fn vstack(&self, other: &BinaryMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut supports = self.supports.clone();
        supports.extend(other.supports.iter().cloned());
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            supports,
        }
    }

    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        let mut out = BitVector::zeros(self.rows);
        for (r, s) in self.supports.iter().enumerate() {
            if s.iter().filter(|&&c| v.get(c)).count() % 2 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BinaryMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let other_rows = other.to_dense_rows();
        let rows: Vec<BitVector> = self
            .supports
            .iter()
            .map(|s| {
                let mut acc = BitVector::zeros(other.cols);
                for &k in s {
                    acc.xor_assign(&other_rows[k]);
                }
                acc
            })
            .collect();
        Self::from_dense_rows(other.cols, &rows)
    }

    pub fn is_zero(&self) -> bool {
        self.supports.iter().all(Vec::is_empty)
    }

    /// Serializes as `rows cols` followed by one sorted `r c` line per nonzero.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.rows, self.cols).unwrap();
        for (r, c) in self.entries() {
            writeln!(out, "{r} {c}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, Gf2Error> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or(Gf2Error::Parse {
            line: 0,
            message: "missing header".into(),
        })?;
        let (rows, cols) = parse_pair(header, 1)?;
        let mut entries = Vec::new();
        for (i, line) in lines.enumerate() {
            entries.push(parse_pair(line, i + 2)?);
        }
        Self::new(rows, cols, entries)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize), Gf2Error> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize, Gf2Error> {
        it.next()
            .ok_or_else(|| Gf2Error::Parse {
                line: lineno,
                message: format!("expected two integers in `{line}`"),
            })?
            .parse()
            .map_err(|e| Gf2Error::Parse {
                line: lineno,
                message: format!("{e}"),
            })
    };
    let a = next()?;
    let b = next()?;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_out_of_bounds() {
        assert!(matches!(
            BinaryMatrix::new(2, 2, [(0, 0), (0, 0)]),
            Err(Gf2Error::DuplicateEntry { .. })
        ));
        assert!(matches!(
            BinaryMatrix::new(2, 2, [(2, 0)]),
            Err(Gf2Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn text_format_is_sorted() {
        let m = BinaryMatrix::new(2, 3, [(1, 2), (0, 1), (1, 0)]).unwrap();
        assert_eq!(m.to_text(), "2 3\n0 1\n1 0\n1 2\n");
        assert_eq!(BinaryMatrix::from_text(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn kron_with_identity() {
        let h = BinaryMatrix::new(1, 2, [(0, 0), (0, 1)]).unwrap();
        let k = h.kron(&BinaryMatrix::identity(2));
        assert_eq!(k.rows(), 2);
        assert_eq!(k.row(0), &[0, 2]);
        assert_eq!(k.row(1), &[1, 3]);
    }
}
