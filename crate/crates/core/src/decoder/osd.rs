use super::{DecodeResult, Decoder, DecoderConfig, OsdMode};
use crate::gf2::{words_for, BitVector};
use crate::sim::DetectorErrorModel;

/// Ordered-statistics decoding from given posteriors, skipping BP.
pub fn osd_postprocess(
    dem: &DetectorErrorModel,
    syndrome: &BitVector,
    posterior: &[f64],
    cfg: &DecoderConfig,
) -> DecodeResult {
    assert_eq!(posterior.len(), dem.mechanisms.len());
    let d = Decoder::new(dem, cfg.clone());
    let fired: Vec<usize> = syndrome.ones().collect();
    let (correction, valid) = d.run_osd(posterior, &fired);
    DecodeResult {
        observables: d.predict(&correction),
        converged: false,
        valid,
        correction,
    }
}

struct BasisRow {
    pivot: usize,
    vec: Vec<u64>,
    /// Basis slots whose columns XOR to `vec`.
    comb: Vec<u64>,
}

fn xor_into(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

fn bit(words: &[u64], i: usize) -> bool {
    words[i / 64] >> (i % 64) & 1 == 1
}

fn flip(words: &mut [u64], i: usize) {
    words[i / 64] ^= 1 << (i % 64);
}

impl Decoder<'_> {
    /// Returns the sorted correction and whether it reproduces the syndrome.
    pub(crate) fn run_osd(&self, posterior: &[f64], fired: &[usize]) -> (Vec<usize>, bool) {
        let n = self.llr.len();
        let dw = words_for(self.dem.num_detectors);
        let sw = words_for(self.rank.max(1));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| posterior[a].total_cmp(&posterior[b]).then(a.cmp(&b)));

        let window = self.cfg.cs_window.unwrap_or(usize::MAX);
        let want_extra = match self.cfg.osd_mode {
            OsdMode::Cs if self.cfg.osd_order > 0 => window.max(2 * self.cfg.osd_order),
            _ => 0,
        };
        let mut basis: Vec<BasisRow> = Vec::with_capacity(self.rank);
        let mut slots: Vec<usize> = Vec::with_capacity(self.rank);
        // Non-basis columns in order, with their basis-slot representation.
        let mut extra: Vec<(usize, Vec<u64>)> = Vec::new();
        for &j in &order {
            let full = basis.len() == self.rank;
            if full && extra.len() >= want_extra {
                break;
            }
            let mut v = vec![0u64; dw];
            for &d in &self.dem.mechanisms[j].detectors {
                flip(&mut v, d);
            }
            let mut comb = vec![0u64; sw];
            for b in &basis {
                if bit(&v, b.pivot) {
                    xor_into(&mut v, &b.vec);
                    xor_into(&mut comb, &b.comb);
                }
            }
            match first_one(&v) {
                Some(pivot) if !full => {
                    flip(&mut comb, basis.len());
                    slots.push(j);
                    basis.push(BasisRow { pivot, vec: v, comb });
                }
                _ => {
                    if extra.len() < want_extra {
                        extra.push((j, comb));
                    }
                }
            }
        }

        let mut s = vec![0u64; dw];
        for &d in fired {
            flip(&mut s, d);
        }
        let mut x0 = vec![0u64; sw];
        for b in &basis {
            if bit(&s, b.pivot) {
                xor_into(&mut s, &b.vec);
                xor_into(&mut x0, &b.comb);
            }
        }
        let valid = s.iter().all(|&w| w == 0);

        let slot_cost = |x: &[u64]| -> f64 {
            (0..slots.len())
                .filter(|&i| bit(x, i))
                .map(|i| self.llr[slots[i]])
                .sum()
        };
        let mut best_x = x0.clone();
        let mut best_t: Vec<usize> = Vec::new();
        let mut best_cost = slot_cost(&x0);
        if valid && !extra.is_empty() {
            let mut x = vec![0u64; sw];
            let mut consider = |t: &[usize], x: &[u64]| {
                let cost = slot_cost(x) + t.iter().map(|&k| self.llr[extra[k].0]).sum::<f64>();
                if cost < best_cost {
                    best_cost = cost;
                    best_x = x.to_vec();
                    best_t = t.iter().map(|&k| extra[k].0).collect();
                }
            };
            for a in 0..extra.len().min(window) {
                x.copy_from_slice(&x0);
                xor_into(&mut x, &extra[a].1);
                consider(&[a], &x);
            }
            let top = extra.len().min(2 * self.cfg.osd_order);
            for a in 0..top {
                for b in a + 1..top {
                    x.copy_from_slice(&x0);
                    xor_into(&mut x, &extra[a].1);
                    xor_into(&mut x, &extra[b].1);
                    consider(&[a, b], &x);
                }
            }
        }
        let mut correction: Vec<usize> = (0..slots.len())
            .filter(|&i| bit(&best_x, i))
            .map(|i| slots[i])
            .chain(best_t)
            .collect();
        correction.sort_unstable();
        (correction, valid)
    }
}

fn first_one(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .position(|&w| w != 0)
        .map(|i| i * 64 + words[i].trailing_zeros() as usize)
}
