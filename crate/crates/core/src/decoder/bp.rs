use super::{Decoder, DecoderConfig, Workspace};
use crate::gf2::BitVector;
use crate::sim::DetectorErrorModel;

/// Result of a standalone BP run.
#[derive(Clone, Debug, PartialEq)]
pub struct BpOutput {
    /// Posterior log-likelihood ratios; negative means "flipped".
    pub posterior: Vec<f64>,
    pub hard: BitVector,
    pub converged: bool,
}

/// Runs flooding min-sum on `dem` for the given syndrome.
pub fn bp_minsum(dem: &DetectorErrorModel, syndrome: &BitVector, cfg: &DecoderConfig) -> BpOutput {
    assert_eq!(syndrome.len(), dem.num_detectors);
    let d = Decoder::new(dem, cfg.clone());
    let mut ws = d.workspace();
    for i in syndrome.ones() {
        ws.syndrome[i] = true;
    }
    let converged = d.run_bp(&mut ws);
    BpOutput {
        posterior: ws.posterior,
        hard: BitVector::from_bools(&ws.hard),
        converged,
    }
}

impl Decoder<'_> {
    /// Fills `ws.posterior` and `ws.hard` from `ws.syndrome`; returns whether
    /// the hard decision reproduces the syndrome.
    pub(crate) fn run_bp(&self, ws: &mut Workspace) -> bool {
        let n = self.llr.len();
        for j in 0..n {
            for e in self.var_start[j]..self.var_start[j + 1] {
                ws.v2c[e] = self.llr[j];
            }
        }
        let scale = self.cfg.scaling_factor;
        for _ in 0..self.cfg.bp_iterations {
            for i in 0..self.check_start.len() - 1 {
                let edges = &self.check_edges[self.check_start[i]..self.check_start[i + 1]];
                let mut negative = ws.syndrome[i];
                let mut min1 = f64::INFINITY;
                let mut min2 = f64::INFINITY;
                let mut arg = usize::MAX;
                for &e in edges {
                    let m = ws.v2c[e];
                    negative ^= m < 0.0;
                    let a = m.abs();
                    if a < min1 {
                        min2 = min1;
                        min1 = a;
                        arg = e;
                    } else if a < min2 {
                        min2 = a;
                    }
                }
                for &e in edges {
                    let mag = if e == arg { min2 } else { min1 };
                    let neg = negative ^ (ws.v2c[e] < 0.0);
                    let msg = scale * mag;
                    ws.c2v[e] = if neg { -msg } else { msg };
                }
            }

            for j in 0..n {
                let range = self.var_start[j]..self.var_start[j + 1];
                let mut total = self.llr[j];
                let mut infinite = false;
                for e in range.clone() {
                    total += ws.c2v[e];
                    infinite |= ws.c2v[e].is_infinite();
                }
                if total.is_nan() {
                    total = 0.0;
                }
                ws.posterior[j] = total;
                ws.hard[j] = total < 0.0;
                for e in range.clone() {
                    ws.v2c[e] = if infinite {
                        self.llr[j]
                            + range
                                .clone()
                                .filter(|&f| f != e)
                                .map(|f| ws.c2v[f])
                                .sum::<f64>()
                    } else {
                        total - ws.c2v[e]
                    };
                    if ws.v2c[e].is_nan() {
                        ws.v2c[e] = 0.0;
                    }
                }
            }

            if self.syndrome_matches(ws) {
                return true;
            }
        }
        false
    }

    fn syndrome_matches(&self, ws: &Workspace) -> bool {
        (0..self.check_start.len() - 1).all(|i| {
            let parity = self.check_edges[self.check_start[i]..self.check_start[i + 1]]
                .iter()
                .fold(false, |acc, &e| acc ^ ws.hard[self.edge_var[e]]);
            parity == ws.syndrome[i]
        })
    }
}
