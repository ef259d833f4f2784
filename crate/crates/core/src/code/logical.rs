use super::css::{CssCode, ProductOrigin};
use super::CodeError;
use crate::gf2::{BinaryMatrix, BitVector, RowEchelon};

/// Paired logical bases `(L_X, L_Z)` with identity overlap-parity matrix.
///
/// Product codes get the aligned basis: every primal Z logical sits on one
/// horizontal line of the layout and every primal X logical on one vertical
/// line. Other codes fall back to [`symplectic_basis`].
pub fn logical_basis(code: &CssCode) -> Result<(Vec<BitVector>, Vec<BitVector>), CodeError> {
    let (lx, lz) = match &code.origin {
        Some(origin) => product_basis(origin, code.n),
        None => symplectic_basis(&code.hx, &code.hz)?,
    };
    if lx.len() != code.k || lz.len() != code.k {
        return Err(CodeError::LogicalCount {
            expected: code.k,
            found: lx.len().min(lz.len()),
        });
    }
    Ok((lx, lz))
}

/// Systematic basis of a hypergraph product.
///
/// With `u_f` the kernel vector of `H₁` attached to free column `f` (zero on
/// every other free column), primal pairs are `X = e_f ⊗ v_g`, `Z = u_f ⊗ e_g`.
/// Dual pairs are built the same way from `H₁ᵀ` and `H₂ᵀ`.
fn product_basis(origin: &ProductOrigin, n: usize) -> (Vec<BitVector>, Vec<BitVector>) {
    let (s1, s2) = (&origin.vertical, &origin.horizontal);
    let mut lx = Vec::new();
    let mut lz = Vec::new();

    let e1 = RowEchelon::new(&s1.h);
    let e2 = RowEchelon::new(&s2.h);
    let (free1, ker1) = free_and_kernel(&e1, s1.n);
    let (free2, ker2) = free_and_kernel(&e2, s2.n);
    for (&f1, u) in free1.iter().zip(&ker1) {
        for (&f2, v) in free2.iter().zip(&ker2) {
            lx.push(BitVector::from_positions(
                n,
                v.ones().map(|j| origin.primal_index(f1, j)),
            ));
            lz.push(BitVector::from_positions(
                n,
                u.ones().map(|i| origin.primal_index(i, f2)),
            ));
        }
    }

    let t1 = RowEchelon::new(&s1.h.transpose());
    let t2 = RowEchelon::new(&s2.h.transpose());
    let (free1, ker1) = free_and_kernel(&t1, s1.r);
    let (free2, ker2) = free_and_kernel(&t2, s2.r);
    for (&g1, w) in free1.iter().zip(&ker1) {
        for (&g2, x) in free2.iter().zip(&ker2) {
            lx.push(BitVector::from_positions(
                n,
                w.ones().map(|a| origin.dual_index(a, g2)),
            ));
            lz.push(BitVector::from_positions(
                n,
                x.ones().map(|b| origin.dual_index(g1, b)),
            ));
        }
    }
    (lx, lz)
}

fn free_and_kernel(e: &RowEchelon, cols: usize) -> (Vec<usize>, Vec<BitVector>) {
    let mut is_pivot = vec![false; cols];
    for &p in e.pivots() {
        is_pivot[p] = true;
    }
    let free = (0..cols).filter(|&c| !is_pivot[c]).collect();
    (free, e.kernel_basis())
}

/// Generic CSS logical basis.
///
/// X logicals are representatives of `ker H_Z / rowspace H_X`, Z logicals of
/// `ker H_X / rowspace H_Z`; the Z set is then rotated by the inverse
/// transpose of the overlap matrix so the pairing becomes the identity.
pub fn symplectic_basis(
    hx: &BinaryMatrix,
    hz: &BinaryMatrix,
) -> Result<(Vec<BitVector>, Vec<BitVector>), CodeError> {
    if !hx.mul(&hz.transpose()).is_zero() {
        return Err(CodeError::NotCss);
    }
    let lx = quotient_basis(hz, hx);
    let lz = quotient_basis(hx, hz);
    if lx.len() != lz.len() {
        return Err(CodeError::LogicalCount {
            expected: lx.len(),
            found: lz.len(),
        });
    }
    let k = lx.len();
    // Invert M over GF(2) by elimination on [M | I].
    let mut aug: Vec<BitVector> = (0..k)
        .map(|i| {
            let mut row = BitVector::zeros(2 * k);
            for j in 0..k {
                if lx[i].and_parity(&lz[j]) {
                    row.set(j, true);
                }
            }
            row.set(k + i, true);
            row
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| aug[r].get(col))
            .ok_or(CodeError::LogicalCount {
                expected: k,
                found: col,
            })?;
        aug.swap(col, pivot);
        let p = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != col && row.get(col) {
                row.xor_assign(&p);
            }
        }
    }
    // Z'_j = Σ_l (M⁻¹)_{l j} Z_l.
    let n = hx.cols();
    let lz_paired = (0..k)
        .map(|j| {
            let mut z = BitVector::zeros(n);
            for (l, zl) in lz.iter().enumerate() {
                if aug[l].get(k + j) {
                    z.xor_assign(zl);
                }
            }
            z
        })
        .collect();
    Ok((lx, lz_paired))
}

/// Kernel vectors of `kernel_of` that are independent modulo `rowspace_of`.
fn quotient_basis(kernel_of: &BinaryMatrix, rowspace_of: &BinaryMatrix) -> Vec<BitVector> {
    let cols = kernel_of.cols();
    let mut span = rowspace_of.to_dense_rows();
    let mut base_rank = RowEchelon::from_rows(cols, span.clone()).rank();
    let mut out = Vec::new();
    for v in RowEchelon::new(kernel_of).kernel_basis() {
        span.push(v.clone());
        let r = RowEchelon::from_rows(cols, span.clone()).rank();
        if r > base_rank {
            base_rank = r;
            out.push(v);
        } else {
            span.pop();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_seed, hypergraph_product, Boundary};

    fn identity_pairing(lx: &[BitVector], lz: &[BitVector]) -> bool {
        lx.iter()
            .enumerate()
            .all(|(i, x)| lz.iter().enumerate().all(|(j, z)| x.and_parity(z) == (i == j)))
    }

    #[test]
    fn surface_code_logicals_have_weight_three() {
        let s = build_seed(3, 1, Boundary::Open).unwrap();
        let c = hypergraph_product(&s, &s).unwrap();
        assert_eq!(c.logicals_x.len(), 1);
        assert_eq!(c.logicals_x[0].weight(), 3);
        assert_eq!(c.logicals_z[0].weight(), 3);
        assert!(identity_pairing(&c.logicals_x, &c.logicals_z));
    }

    #[test]
    fn product_basis_commutes_with_stabilizers() {
        for (n, k, b) in [(7, 3, Boundary::Open), (6, 2, Boundary::Periodic)] {
            let s = build_seed(n, k, b).unwrap();
            let c = hypergraph_product(&s, &s).unwrap();
            assert!(identity_pairing(&c.logicals_x, &c.logicals_z));
            for x in &c.logicals_x {
                assert!(c.hz.mul_vec(x).is_zero());
            }
            for z in &c.logicals_z {
                assert!(c.hx.mul_vec(z).is_zero());
            }
        }
    }

    #[test]
    fn generic_basis_agrees_on_count() {
        let s = build_seed(7, 3, Boundary::Open).unwrap();
        let c = hypergraph_product(&s, &s).unwrap();
        let (lx, lz) = symplectic_basis(&c.hx, &c.hz).unwrap();
        assert_eq!(lx.len(), 9);
        assert!(identity_pairing(&lx, &lz));
        for z in &lz {
            assert!(c.hx.mul_vec(z).is_zero());
        }
    }

    #[test]
    fn rejects_non_commuting_checks() {
        let hx = BinaryMatrix::new(1, 2, [(0, 0)]).unwrap();
        let hz = BinaryMatrix::new(1, 2, [(0, 0)]).unwrap();
        assert!(matches!(symplectic_basis(&hx, &hz), Err(CodeError::NotCss)));
    }
}
