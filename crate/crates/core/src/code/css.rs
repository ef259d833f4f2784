use super::layout::{assign_layout, LayoutMode, QubitLayout};
use super::logical::logical_basis;
use super::seed::{Boundary, SeedCode};
use super::CodeError;
use crate::gf2::{BinaryMatrix, BitVector};

/// The two seeds a product code was built from. `vertical` indexes the
/// first tensor factor (row index `i` / `a`), `horizontal` the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductOrigin {
    pub vertical: SeedCode,
    pub horizontal: SeedCode,
}

impl ProductOrigin {
    pub fn boundary(&self) -> Boundary {
        self.vertical.boundary
    }

    pub fn primal_count(&self) -> usize {
        self.vertical.n * self.horizontal.n
    }

    pub fn dual_count(&self) -> usize {
        self.vertical.r * self.horizontal.r
    }

    pub fn primal_index(&self, i: usize, j: usize) -> usize {
        i * self.horizontal.n + j
    }

    pub fn dual_index(&self, a: usize, b: usize) -> usize {
        self.primal_count() + a * self.horizontal.r + b
    }

    /// X check `(a, j)` lives in row `a·n₂ + j`.
    pub fn x_check_index(&self, a: usize, j: usize) -> usize {
        a * self.horizontal.n + j
    }

    /// Z check `(i, b)` lives in row `i·r₂ + b`.
    pub fn z_check_index(&self, i: usize, b: usize) -> usize {
        i * self.horizontal.r + b
    }

    /// Largest seed exponent, i.e. the `k` of `1 + x + x^k`.
    pub fn degree(&self) -> usize {
        self.vertical.poly.degree().max(self.horizontal.poly.degree())
    }
}

/// CSS stabilizer code with paired logical bases.
#[derive(Clone, Debug)]
pub struct CssCode {
    pub n: usize,
    pub k: usize,
    pub d_bound: Option<usize>,
    pub d_exact: Option<usize>,
    pub hx: BinaryMatrix,
    pub hz: BinaryMatrix,
    /// `logicals_x[i]` overlaps `logicals_z[j]` oddly iff `i == j`.
    pub logicals_x: Vec<BitVector>,
    pub logicals_z: Vec<BitVector>,
    pub origin: Option<ProductOrigin>,
    pub layout: Option<QubitLayout>,
}

impl CssCode {
    /// Best known distance: exact if computed, otherwise the product bound.
    pub fn distance(&self) -> Option<usize> {
        self.d_exact.or(self.d_bound)
    }

    pub fn label(&self) -> String {
        match self.distance() {
            Some(d) => format!("[[{},{},{}]]", self.n, self.k, d),
            None => format!("[[{},{},?]]", self.n, self.k),
        }
    }

    pub fn commutes(&self) -> bool {
        self.hx.mul(&self.hz.transpose()).is_zero()
    }

    pub fn max_stabilizer_weight(&self) -> usize {
        self.hx
            .row_supports()
            .iter()
            .chain(self.hz.row_supports())
            .map(Vec::len)
            .max()
            .unwrap_or(0)
    }

    /// Largest number of checks (of either type) acting on one qubit.
    pub fn max_qubit_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n];
        for (_, c) in self.hx.entries().chain(self.hz.entries()) {
            deg[c] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Overlap-parity matrix `M[i][j] = |L_X^i ∧ L_Z^j| mod 2`.
    pub fn pairing_matrix(&self) -> Vec<Vec<bool>> {
        self.logicals_x
            .iter()
            .map(|x| self.logicals_z.iter().map(|z| x.and_parity(z)).collect())
            .collect()
    }
}

/// Hypergraph product of two seeds.
///
/// `H_X = [H₁⊗I | I⊗H₂ᵀ]`, `H_Z = [I⊗H₂ | H₁ᵀ⊗I]`, primal block first.
/// The default layout matches the seed boundary.
pub fn hypergraph_product(a: &SeedCode, b: &SeedCode) -> Result<CssCode, CodeError> {
    if a.boundary != b.boundary {
        return Err(CodeError::BoundaryMismatch(
            a.boundary.as_str(),
            b.boundary.as_str(),
        ));
    }
    let (h1, h2) = (&a.h, &b.h);
    let hx = h1
        .kron(&BinaryMatrix::identity(b.n))
        .hstack(&BinaryMatrix::identity(a.r).kron(&h2.transpose()));
    let hz = BinaryMatrix::identity(a.n)
        .kron(h2)
        .hstack(&h1.transpose().kron(&BinaryMatrix::identity(b.r)));
    let n = a.n * b.n + a.r * b.r;
    let k = a.k_logical * b.k_logical + a.k_transpose() * b.k_transpose();
    let d_bound = [
        a.distance(),
        b.distance(),
        a.transpose_distance(),
        b.transpose_distance(),
    ]
    .into_iter()
    .flatten()
    .min();
    let mut code = CssCode {
        n,
        k,
        d_bound: if k > 0 { d_bound } else { None },
        d_exact: None,
        hx,
        hz,
        logicals_x: Vec::new(),
        logicals_z: Vec::new(),
        origin: Some(ProductOrigin {
            vertical: a.clone(),
            horizontal: b.clone(),
        }),
        layout: None,
    };
    let (lx, lz) = logical_basis(&code)?;
    code.logicals_x = lx;
    code.logicals_z = lz;
    let mode = match a.boundary {
        Boundary::Periodic => LayoutMode::Periodic,
        Boundary::Open => LayoutMode::Open,
    };
    code.layout = Some(assign_layout(&code, mode)?);
    Ok(code)
}
