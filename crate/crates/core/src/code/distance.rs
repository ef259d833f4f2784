use std::collections::HashMap;

use super::css::CssCode;
use crate::gf2::{words_for, BinaryMatrix, BitVector};
use crate::par::{map_indices, Parallelism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliKind {
    X,
    Z,
}

/// Exact distance if some logical has weight `≤ w_max`, otherwise `None`.
pub fn distance_bruteforce(code: &CssCode, w_max: usize) -> Option<usize> {
    let x = min_logical_weight(code, PauliKind::X, w_max);
    let z = min_logical_weight(code, PauliKind::Z, w_max);
    match (x, z) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Smallest weight `≤ w_max` of a nontrivial logical of the given type.
///
/// A support is a nontrivial X logical iff it has zero `H_Z` syndrome and
/// anticommutes with some Z logical of the paired basis (and vice versa).
pub fn min_logical_weight(code: &CssCode, kind: PauliKind, w_max: usize) -> Option<usize> {
    let (checks, partners) = match kind {
        PauliKind::X => (&code.hz, &code.logicals_z),
        PauliKind::Z => (&code.hx, &code.logicals_x),
    };
    if partners.is_empty() {
        return None;
    }
    let search = Search::new(checks, partners);
    (1..=w_max.min(code.n)).find(|&w| search.exists(w))
}

struct Search {
    n: usize,
    syn_words: usize,
    /// Per qubit: syndrome words followed by logical-overlap words.
    columns: Vec<Vec<u64>>,
    /// Qubits grouped by their full column signature.
    by_syndrome: HashMap<Vec<u64>, Vec<usize>>,
}

impl Search {
    fn new(checks: &BinaryMatrix, partners: &[BitVector]) -> Self {
        let n = checks.cols();
        let syn_words = words_for(checks.rows());
        let log_words = words_for(partners.len());
        let mut columns = vec![vec![0u64; syn_words + log_words]; n];
        for (r, c) in checks.entries() {
            columns[c][r / 64] ^= 1 << (r % 64);
        }
        for (l, p) in partners.iter().enumerate() {
            for q in p.ones() {
                columns[q][syn_words + l / 64] ^= 1 << (l % 64);
            }
        }
        let mut by_syndrome: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        for (q, col) in columns.iter().enumerate() {
            by_syndrome.entry(col[..syn_words].to_vec()).or_default().push(q);
        }
        Self {
            n,
            syn_words,
            columns,
            by_syndrome,
        }
    }

    fn exists(&self, w: usize) -> bool {
        let width = self.columns.first().map_or(0, Vec::len);
        if w == 1 {
            return self.columns.iter().any(|c| self.is_logical(c));
        }
        let hits = map_indices(Parallelism::default(), self.n, |first| {
            let mut acc = self.columns[first].clone();
            let mut scratch = vec![0u64; width];
            self.dfs(first, w - 1, &mut acc, &mut scratch)
        });
        hits.into_iter().any(|h| h)
    }

    /// `remaining` more qubits with index above `last`; the final one is looked up.
    fn dfs(&self, last: usize, remaining: usize, acc: &mut Vec<u64>, scratch: &mut Vec<u64>) -> bool {
        if remaining == 1 {
            let Some(candidates) = self.by_syndrome.get(&acc[..self.syn_words]) else {
                return false;
            };
            for &q in candidates {
                if q <= last {
                    continue;
                }
                for (s, (a, c)) in scratch.iter_mut().zip(acc.iter().zip(&self.columns[q])) {
                    *s = a ^ c;
                }
                if self.is_logical(scratch) {
                    return true;
                }
            }
            return false;
        }
        for q in last + 1..self.n {
            xor_into(acc, &self.columns[q]);
            let found = self.dfs(q, remaining - 1, acc, scratch);
            xor_into(acc, &self.columns[q]);
            if found {
                return true;
            }
        }
        false
    }

    fn is_logical(&self, v: &[u64]) -> bool {
        v[..self.syn_words].iter().all(|&w| w == 0) && v[self.syn_words..].iter().any(|&w| w != 0)
    }
}

fn xor_into(acc: &mut [u64], col: &[u64]) {
    for (a, c) in acc.iter_mut().zip(col) {
        *a ^= c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_seed, hypergraph_product, Boundary};

    #[test]
    fn surface_code_distance() {
        let s = build_seed(3, 1, Boundary::Open).unwrap();
        let c = hypergraph_product(&s, &s).unwrap();
        assert_eq!(distance_bruteforce(&c, 3), Some(3));
        assert_eq!(distance_bruteforce(&c, 2), None);
    }

    #[test]
    fn k2_distance_matches_bound() {
        // Seeds of length 6 with 1+x+x^2 have d = 4.
        let s = build_seed(6, 2, Boundary::Open).unwrap();
        let c = hypergraph_product(&s, &s).unwrap();
        assert_eq!(c.d_bound, Some(4));
        assert_eq!(distance_bruteforce(&c, 4), Some(4));
    }
}
