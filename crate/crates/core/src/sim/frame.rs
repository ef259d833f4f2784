use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::batch::ShotBatch;
use super::SimError;
use crate::circuit::{Circuit, Op};
use crate::gf2::words_for;
use crate::par::{map_indices, Parallelism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }
}

/// One Pauli component of a noise channel, with its share of the channel probability.
#[derive(Clone, Debug, PartialEq)]
pub struct FaultSite {
    pub op: usize,
    pub paulis: Vec<(usize, Pauli)>,
    pub prob: f64,
}

/// Every nonzero-probability component of every noise channel, in circuit order.
pub fn fault_sites(circuit: &Circuit) -> Vec<FaultSite> {
    let mut out = Vec::new();
    for (i, op) in circuit.ops.iter().enumerate() {
        match op {
            Op::Dep1(p, qs) if *p > 0.0 => {
                for &q in qs {
                    for pa in Pauli::ALL {
                        out.push(FaultSite {
                            op: i,
                            paulis: vec![(q, pa)],
                            prob: p / 3.0,
                        });
                    }
                }
            }
            Op::Dep2(p, pairs) if *p > 0.0 => {
                for &(a, b) in pairs {
                    for code in 1..16 {
                        let mut paulis = Vec::with_capacity(2);
                        if let Some(pa) = pauli_code(code / 4) {
                            paulis.push((a, pa));
                        }
                        if let Some(pb) = pauli_code(code % 4) {
                            paulis.push((b, pb));
                        }
                        out.push(FaultSite {
                            op: i,
                            paulis,
                            prob: p / 15.0,
                        });
                    }
                }
            }
            Op::XErr(p, qs) | Op::ZErr(p, qs) if *p > 0.0 => {
                let pa = if matches!(op, Op::XErr(..)) {
                    Pauli::X
                } else {
                    Pauli::Z
                };
                for &q in qs {
                    out.push(FaultSite {
                        op: i,
                        paulis: vec![(q, pa)],
                        prob: *p,
                    });
                }
            }
            _ => {}
        }
    }
    out
}

fn pauli_code(c: usize) -> Option<Pauli> {
    match c {
        1 => Some(Pauli::X),
        2 => Some(Pauli::Y),
        3 => Some(Pauli::Z),
        _ => None,
    }
}

/// Frame state for 64 shots at once: bit `s` of each word belongs to shot `s`.
struct Frames {
    x: Vec<u64>,
    z: Vec<u64>,
    record: Vec<u64>,
    detectors: Vec<u64>,
    observables: Vec<u64>,
}

impl Frames {
    fn new(circuit: &Circuit) -> Self {
        Self {
            x: vec![0; circuit.num_qubits],
            z: vec![0; circuit.num_qubits],
            record: Vec::with_capacity(circuit.num_measurements()),
            detectors: Vec::with_capacity(circuit.num_detectors()),
            observables: vec![0; circuit.num_observables()],
        }
    }

    fn apply(&mut self, q: usize, p: Pauli, lanes: u64) {
        if p.has_x() {
            self.x[q] ^= lanes;
        }
        if p.has_z() {
            self.z[q] ^= lanes;
        }
    }
}

/// Calls `hit(i, lane)` for each of `n × 64` Bernoulli(p) trials that fires,
/// skipping ahead geometrically.
fn for_each_hit(rng: &mut ChaCha8Rng, p: f64, n: usize, mut hit: impl FnMut(usize, u64)) {
    if p <= 0.0 || n == 0 {
        return;
    }
    let total = n as u64 * 64;
    if p >= 1.0 {
        for t in 0..total {
            hit((t / 64) as usize, 1u64 << (t % 64));
        }
        return;
    }
    let log_q = (-p).ln_1p();
    let mut pos: u64 = 0;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let gap = (u.ln() / log_q).floor();
        if gap >= (total - pos) as f64 {
            return;
        }
        pos += gap as u64;
        hit((pos / 64) as usize, 1u64 << (pos % 64));
        pos += 1;
        if pos >= total {
            return;
        }
    }
}

/// Runs one 64-shot block. With `rng = None` all channels are silent and no
/// gauge randomization happens; `inject` then places a single fault on every lane.
fn run_block(
    circuit: &Circuit,
    mut rng: Option<&mut ChaCha8Rng>,
    inject: Option<&FaultSite>,
) -> Frames {
    let mut f = Frames::new(circuit);
    let gauge = |rng: &mut Option<&mut ChaCha8Rng>| -> u64 {
        rng.as_mut().map_or(0, |r| r.random::<u64>())
    };
    for (i, op) in circuit.ops.iter().enumerate() {
        match op {
            Op::R(qs) => {
                for &q in qs {
                    f.x[q] = 0;
                    f.z[q] = gauge(&mut rng);
                }
            }
            Op::RX(qs) => {
                for &q in qs {
                    f.z[q] = 0;
                    f.x[q] = gauge(&mut rng);
                }
            }
            Op::M(qs) => {
                for &q in qs {
                    f.record.push(f.x[q]);
                    f.z[q] ^= gauge(&mut rng);
                }
            }
            Op::MX(qs) => {
                for &q in qs {
                    f.record.push(f.z[q]);
                    f.x[q] ^= gauge(&mut rng);
                }
            }
            Op::MR(qs) => {
                for &q in qs {
                    f.record.push(f.x[q]);
                    f.x[q] = 0;
                    f.z[q] = gauge(&mut rng);
                }
            }
            Op::H(qs) => {
                for &q in qs {
                    std::mem::swap(&mut f.x[q], &mut f.z[q]);
                }
            }
            Op::CX(gates) => {
                for &(c, t, _) in gates {
                    f.x[t] ^= f.x[c];
                    f.z[c] ^= f.z[t];
                }
            }
            Op::Dep1(p, qs) => {
                if let Some(r) = rng.as_mut() {
                    let mut hits = Vec::new();
                    for_each_hit(r, *p, qs.len(), |i, lane| hits.push((i, lane)));
                    for (i, lane) in hits {
                        let pa = Pauli::ALL[r.random_range(0..3)];
                        f.apply(qs[i], pa, lane);
                    }
                }
            }
            Op::Dep2(p, pairs) => {
                if let Some(r) = rng.as_mut() {
                    let mut hits = Vec::new();
                    for_each_hit(r, *p, pairs.len(), |i, lane| hits.push((i, lane)));
                    for (i, lane) in hits {
                        let code = r.random_range(1..16usize);
                        let (a, b) = pairs[i];
                        if let Some(pa) = pauli_code(code / 4) {
                            f.apply(a, pa, lane);
                        }
                        if let Some(pb) = pauli_code(code % 4) {
                            f.apply(b, pb, lane);
                        }
                    }
                }
            }
            Op::XErr(p, qs) | Op::ZErr(p, qs) => {
                if let Some(r) = rng.as_mut() {
                    let pa = if matches!(op, Op::XErr(..)) {
                        Pauli::X
                    } else {
                        Pauli::Z
                    };
                    let mut hits = Vec::new();
                    for_each_hit(r, *p, qs.len(), |i, lane| hits.push((i, lane)));
                    for (i, lane) in hits {
                        f.apply(qs[i], pa, lane);
                    }
                }
            }
            Op::Detector(ms) => {
                let v = ms.iter().fold(0u64, |acc, &m| acc ^ f.record[m]);
                f.detectors.push(v);
            }
            Op::Observable(idx, ms) => {
                let v = ms.iter().fold(0u64, |acc, &m| acc ^ f.record[m]);
                f.observables[*idx] ^= v;
            }
            Op::Tick => {}
        }
        if let Some(site) = inject {
            if site.op == i {
                for &(q, pa) in &site.paulis {
                    f.apply(q, pa, u64::MAX);
                }
            }
        }
    }
    f
}

/// Detector and observable flips caused by a single fault, by forward propagation.
pub fn inject_fault(circuit: &Circuit, site: &FaultSite) -> (Vec<usize>, Vec<usize>) {
    let f = run_block(circuit, None, Some(site));
    let ones = |v: &[u64]| -> Vec<usize> {
        v.iter()
            .enumerate()
            .filter(|(_, &w)| w & 1 == 1)
            .map(|(i, _)| i)
            .collect()
    };
    (ones(&f.detectors), ones(&f.observables))
}

/// Samples `shots` independent runs. Shots are simulated in blocks of 64;
/// block `b` draws from ChaCha8 stream `b` of `seed`, so results do not depend
/// on how blocks are scheduled.
pub fn sample(circuit: &Circuit, shots: usize, seed: u64) -> Result<ShotBatch, SimError> {
    sample_with(circuit, shots, seed, 0, Parallelism::default())
}

/// Like [`sample`], starting at block `first_block` of the seed's stream space.
pub fn sample_with(
    circuit: &Circuit,
    shots: usize,
    seed: u64,
    first_block: u64,
    par: Parallelism,
) -> Result<ShotBatch, SimError> {
    if shots == 0 {
        return Err(SimError::NoShots);
    }
    let blocks = shots.div_ceil(64);
    let results = map_indices(par, blocks, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(first_block + b as u64);
        let f = run_block(circuit, Some(&mut rng), None);
        (f.detectors, f.observables)
    });
    let nd = circuit.num_detectors();
    let no = circuit.num_observables();
    let mut batch = ShotBatch::zeros(shots, nd, no, seed);
    let dw = words_for(nd);
    let ow = words_for(no);
    for (b, (dets, obs)) in results.into_iter().enumerate() {
        let base = b * 64;
        let lanes = (shots - base).min(64);
        let mask = if lanes == 64 {
            u64::MAX
        } else {
            (1u64 << lanes) - 1
        };
        scatter(&dets, mask, base, dw, &mut batch.detectors);
        scatter(&obs, mask, base, ow, &mut batch.observables);
    }
    Ok(batch)
}

/// Transposes bit-major 64-lane words into shot-major rows of `row_words`.
fn scatter(bits: &[u64], mask: u64, base: usize, row_words: usize, out: &mut [u64]) {
    for (d, &w) in bits.iter().enumerate() {
        let mut w = w & mask;
        while w != 0 {
            let lane = w.trailing_zeros() as usize;
            w &= w - 1;
            out[(base + lane) * row_words + d / 64] |= 1u64 << (d % 64);
        }
    }
}
