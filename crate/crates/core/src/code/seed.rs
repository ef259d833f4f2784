use serde::{Deserialize, Serialize};

use super::CodeError;
use crate::gf2::{kernel_basis, rank, BinaryMatrix, BitVector};

/// Boundary condition of a classical seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Square circulant check matrix (wrapping shifts).
    #[serde(alias = "pbc")]
    Periodic,
    /// Rectangular `(n − deg) × n` check matrix (non-wrapping shifts).
    #[serde(alias = "obc")]
    Open,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Periodic => "pbc",
            Boundary::Open => "obc",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pbc" | "periodic" => Ok(Boundary::Periodic),
            "obc" | "open" => Ok(Boundary::Open),
            other => Err(CodeError::InvalidSeed(format!("unknown boundary `{other}`"))),
        }
    }
}

/// Seed polynomial with binary coefficients, stored as the set of exponents
/// carrying a one. Always contains the constant term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedPolynomial {
    exponents: Vec<usize>,
}

impl SeedPolynomial {
    pub fn new(mut exponents: Vec<usize>) -> Result<Self, CodeError> {
        exponents.sort_unstable();
        exponents.dedup();
        if exponents.first() != Some(&0) {
            return Err(CodeError::InvalidSeed(
                "seed polynomial must contain the constant term".into(),
            ));
        }
        if exponents.len() < 2 {
            return Err(CodeError::InvalidSeed(
                "seed polynomial must have positive degree".into(),
            ));
        }
        Ok(Self { exponents })
    }

    /// `1 + x + x^k`; for `k = 1` the exponent set collapses to `{0, 1}`
    /// (repetition-code checks).
    pub fn la_cross(k: usize) -> Result<Self, CodeError> {
        if k == 0 {
            return Err(CodeError::InvalidSeed("degree k must be at least 1".into()));
        }
        Self::new(vec![0, 1, k])
    }

    /// `1 + x^k`.
    pub fn sparse(k: usize) -> Result<Self, CodeError> {
        if k == 0 {
            return Err(CodeError::InvalidSeed("degree k must be at least 1".into()));
        }
        Self::new(vec![0, k])
    }

    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    pub fn degree(&self) -> usize {
        *self.exponents.last().unwrap()
    }
}

/// Classical cyclic seed code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedCode {
    pub n: usize,
    pub poly: SeedPolynomial,
    pub boundary: Boundary,
    pub h: BinaryMatrix,
    /// `n − rank(H)`.
    pub k_logical: usize,
    /// Number of checks (rows of `H`).
    pub r: usize,
}

/// Seed code for `h(x) = 1 + x + x^k`.
pub fn build_seed(n: usize, k: usize, boundary: Boundary) -> Result<SeedCode, CodeError> {
    if k == 0 || k >= n {
        return Err(CodeError::InvalidSeed(format!(
            "need 1 <= k < n, got n={n}, k={k}"
        )));
    }
    build_seed_with(n, SeedPolynomial::la_cross(k)?, boundary)
}

pub fn build_seed_with(
    n: usize,
    poly: SeedPolynomial,
    boundary: Boundary,
) -> Result<SeedCode, CodeError> {
    let deg = poly.degree();
    if deg >= n {
        return Err(CodeError::InvalidSeed(format!(
            "polynomial degree {deg} must be below n={n}"
        )));
    }
    let h = match boundary {
        Boundary::Periodic => BinaryMatrix::new(
            n,
            n,
            (0..n).flat_map(|r| poly.exponents().iter().map(move |&e| (r, (r + e) % n))),
        ),
        Boundary::Open => BinaryMatrix::new(
            n - deg,
            n,
            (0..n - deg).flat_map(|r| poly.exponents().iter().map(move |&e| (r, r + e))),
        ),
    }
    .map_err(|e| CodeError::InvalidSeed(e.to_string()))?;
    let k_logical = n - rank(&h);
    let r = h.rows();
    Ok(SeedCode {
        n,
        poly,
        boundary,
        h,
        k_logical,
        r,
    })
}

impl SeedCode {
    /// Number of encoded bits of the transposed code, `r − rank(H)`.
    pub fn k_transpose(&self) -> usize {
        self.r - (self.n - self.k_logical)
    }

    /// Minimum codeword weight of `ker H`, or `None` when the code is trivial.
    pub fn distance(&self) -> Option<usize> {
        min_codeword_weight(&self.h)
    }

    /// Minimum codeword weight of `ker Hᵀ`, or `None` when the transposed code is trivial.
    pub fn transpose_distance(&self) -> Option<usize> {
        min_codeword_weight(&self.h.transpose())
    }

    /// Exponent of the long-range term, if the polynomial has one.
    pub fn arm_exponent(&self) -> Option<usize> {
        self.poly.exponents().iter().copied().find(|&e| e >= 2)
    }
}

/// Brute force over all nonzero codewords spanned by a kernel basis.
fn min_codeword_weight(h: &BinaryMatrix) -> Option<usize> {
    let basis = kernel_basis(h);
    let k = basis.len();
    if k == 0 {
        return None;
    }
    assert!(k < 28, "seed kernel dimension {k} too large for enumeration");
    // Gray-code walk visits every nonzero combination once.
    let mut current = BitVector::zeros(h.cols());
    let mut best = usize::MAX;
    for step in 1u64..(1u64 << k) {
        let flip = step.trailing_zeros() as usize;
        current.xor_assign(&basis[flip]);
        best = best.min(current.weight());
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_seed_shape() {
        let s = build_seed(7, 3, Boundary::Open).unwrap();
        assert_eq!((s.h.rows(), s.h.cols()), (4, 7));
        assert_eq!(s.h.row(0), &[0, 1, 3]);
        assert_eq!(s.k_logical, 3);
        assert_eq!(s.k_transpose(), 0);
        assert_eq!(s.transpose_distance(), None);
    }

    #[test]
    fn repetition_seed() {
        let s = build_seed(3, 1, Boundary::Open).unwrap();
        assert_eq!(s.h.row(0), &[0, 1]);
        assert_eq!(s.h.row(1), &[1, 2]);
        assert_eq!(s.k_logical, 1);
        assert_eq!(s.distance(), Some(3));
    }

    #[test]
    fn periodic_seed_rank() {
        let s = build_seed(6, 2, Boundary::Periodic).unwrap();
        assert_eq!((s.h.rows(), s.h.cols()), (6, 6));
        assert_eq!(s.h.row(0), &[0, 1, 2]);
        assert_eq!(s.h.row(5), &[0, 1, 5]);
        assert_eq!(s.k_logical, 2);
        // Circulant: rank(H) = rank(Hᵀ), so the transposed code also has k = 2.
        assert_eq!(s.k_transpose(), 2);
    }

    #[test]
    fn periodic_full_rank_gives_zero_k() {
        // 1 + x + x^2 does not divide x^5 - 1 over GF(2).
        let s = build_seed(5, 2, Boundary::Periodic).unwrap();
        assert_eq!(s.k_logical, 0);
        assert_eq!(s.distance(), None);
    }

    #[test]
    fn rejects_degree_not_below_n() {
        assert!(build_seed(3, 3, Boundary::Open).is_err());
        assert!(build_seed(3, 0, Boundary::Open).is_err());
    }

    #[test]
    fn open_la_cross_distances() {
        // Codewords of 1 + x + x^2 are period-3 patterns.
        let d: Vec<_> = (5..=9)
            .map(|n| build_seed(n, 2, Boundary::Open).unwrap().distance().unwrap())
            .collect();
        assert_eq!(d, vec![3, 4, 4, 5, 6]);
        assert_eq!(build_seed(7, 3, Boundary::Open).unwrap().distance(), Some(4));
    }
}
