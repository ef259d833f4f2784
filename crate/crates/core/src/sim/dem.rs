use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use super::frame::{fault_sites, Pauli};
use super::{xor_probability, SimError};
use crate::circuit::{Circuit, Op};
use crate::gf2::{words_for, BinaryMatrix, BitVector};

/// One independent error mechanism and the detectors and observables it flips.
#[derive(Clone, Debug, PartialEq)]
pub struct Mechanism {
    pub prior: f64,
    pub detectors: Vec<usize>,
    pub observables: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorErrorModel {
    pub num_detectors: usize,
    pub num_observables: usize,
    pub mechanisms: Vec<Mechanism>,
}

impl DetectorErrorModel {
    /// Merges mechanisms with identical signatures and drops the ones that
    /// flip nothing. Output order is sorted by signature.
    pub fn from_components(
        num_detectors: usize,
        num_observables: usize,
        components: impl IntoIterator<Item = (f64, Vec<usize>, Vec<usize>)>,
    ) -> Result<Self, SimError> {
        let mut merged: BTreeMap<(Vec<usize>, Vec<usize>), f64> = BTreeMap::new();
        for (p, mut d, mut o) in components {
            if p <= 0.0 {
                continue;
            }
            d.sort_unstable();
            o.sort_unstable();
            if d.is_empty() && o.is_empty() {
                continue;
            }
            let e = merged.entry((d, o)).or_insert(0.0);
            *e = xor_probability(*e, p);
        }
        let mut mechanisms = Vec::with_capacity(merged.len());
        for ((detectors, observables), prior) in merged {
            if prior > 0.5 {
                return Err(SimError::PriorTooLarge(prior));
            }
            mechanisms.push(Mechanism {
                prior,
                detectors,
                observables,
            });
        }
        Ok(Self {
            num_detectors,
            num_observables,
            mechanisms,
        })
    }

    /// Independent bit flips on the columns of `checks`: detectors are the
    /// check rows, observables are odd overlaps with `logicals`.
    pub fn code_capacity(checks: &BinaryMatrix, logicals: &[BitVector], p: f64) -> Self {
        let cols = checks.transpose();
        let components = (0..checks.cols()).map(|q| {
            let obs = logicals
                .iter()
                .enumerate()
                .filter(|(_, l)| l.get(q))
                .map(|(i, _)| i)
                .collect();
            (p, cols.row(q).to_vec(), obs)
        });
        Self::from_components(checks.rows(), logicals.len(), components)
            .expect("code-capacity priors are at most p")
    }

    pub fn len(&self) -> usize {
        self.mechanisms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mechanisms.is_empty()
    }

    /// Detectors × mechanisms.
    pub fn h_dem(&self) -> BinaryMatrix {
        BinaryMatrix::new(
            self.num_detectors,
            self.mechanisms.len(),
            self.mechanisms
                .iter()
                .enumerate()
                .flat_map(|(j, m)| m.detectors.iter().map(move |&d| (d, j))),
        )
        .expect("mechanism detectors are in range and distinct")
    }

    /// Observables × mechanisms.
    pub fn l_dem(&self) -> BinaryMatrix {
        BinaryMatrix::new(
            self.num_observables,
            self.mechanisms.len(),
            self.mechanisms
                .iter()
                .enumerate()
                .flat_map(|(j, m)| m.observables.iter().map(move |&o| (o, j))),
        )
        .expect("mechanism observables are in range and distinct")
    }

    /// Mechanisms that flip an observable without firing any detector.
    pub fn undetectable_logical(&self) -> Vec<usize> {
        self.mechanisms
            .iter()
            .enumerate()
            .filter(|(_, m)| m.detectors.is_empty() && !m.observables.is_empty())
            .map(|(i, _)| i)
            .collect()
    }

    /// Probability that each detector fires, from the XOR of the priors touching it.
    pub fn detector_marginals(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.num_detectors];
        for m in &self.mechanisms {
            for &d in &m.detectors {
                out[d] = xor_probability(out[d], m.prior);
            }
        }
        out
    }

    /// `detectors D`, `observables K`, then `error(p) D.. L..` per mechanism.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "detectors {}", self.num_detectors).unwrap();
        writeln!(out, "observables {}", self.num_observables).unwrap();
        for m in &self.mechanisms {
            write!(out, "error({})", m.prior).unwrap();
            for d in &m.detectors {
                write!(out, " D{d}").unwrap();
            }
            for o in &m.observables {
                write!(out, " L{o}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

impl FromStr for DetectorErrorModel {
    type Err = SimError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut nd = None;
        let mut no = None;
        let mut mechanisms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| SimError::Parse {
                line: idx + 1,
                message,
            };
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap();
            let num = |s: Option<&str>| -> Result<usize, SimError> {
                let s = s.ok_or_else(|| err("missing count".into()))?;
                s.parse().map_err(|e| err(format!("`{s}`: {e}")))
            };
            match head {
                "detectors" => nd = Some(num(parts.next())?),
                "observables" => no = Some(num(parts.next())?),
                _ => {
                    let p = head
                        .strip_prefix("error(")
                        .and_then(|s| s.strip_suffix(')'))
                        .ok_or_else(|| err(format!("unexpected `{head}`")))?;
                    let prior: f64 = p.parse().map_err(|e| err(format!("`{p}`: {e}")))?;
                    if !(prior > 0.0 && prior <= 0.5) {
                        return Err(err(format!("prior {prior} outside (0, 0.5]")));
                    }
                    let mut detectors = Vec::new();
                    let mut observables = Vec::new();
                    for t in parts {
                        if let Some(d) = t.strip_prefix('D') {
                            detectors.push(num(Some(d))?);
                        } else if let Some(o) = t.strip_prefix('L') {
                            observables.push(num(Some(o))?);
                        } else {
                            return Err(err(format!("unexpected target `{t}`")));
                        }
                    }
                    mechanisms.push(Mechanism {
                        prior,
                        detectors,
                        observables,
                    });
                }
            }
        }
        let num_detectors = nd.unwrap_or_else(|| {
            mechanisms
                .iter()
                .flat_map(|m| m.detectors.iter().map(|d| d + 1))
                .max()
                .unwrap_or(0)
        });
        let num_observables = no.unwrap_or_else(|| {
            mechanisms
                .iter()
                .flat_map(|m| m.observables.iter().map(|o| o + 1))
                .max()
                .unwrap_or(0)
        });
        for m in &mechanisms {
            if m.detectors.iter().any(|&d| d >= num_detectors)
                || m.observables.iter().any(|&o| o >= num_observables)
            {
                return Err(SimError::Parse {
                    line: 0,
                    message: "mechanism target out of range".into(),
                });
            }
        }
        Ok(Self {
            num_detectors,
            num_observables,
            mechanisms,
        })
    }
}

/// Sensitivity of each qubit's X and Z frame to later detectors and observables.
struct Sensitivity {
    width: usize,
    sx: Vec<u64>,
    sz: Vec<u64>,
}

impl Sensitivity {
    fn x(&self, q: usize) -> &[u64] {
        &self.sx[q * self.width..(q + 1) * self.width]
    }

    fn z(&self, q: usize) -> &[u64] {
        &self.sz[q * self.width..(q + 1) * self.width]
    }

    fn of(&self, q: usize, p: Pauli, out: &mut [u64]) {
        if p.has_x() {
            xor(out, self.x(q));
        }
        if p.has_z() {
            xor(out, self.z(q));
        }
    }

    fn clear(&mut self, q: usize) {
        let w = self.width;
        self.sx[q * w..(q + 1) * w].fill(0);
        self.sz[q * w..(q + 1) * w].fill(0);
    }
}

fn xor(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

/// Detector error model of an instrumented circuit.
///
/// Sensitivities are propagated backwards from the end of the circuit, so each
/// noise component is resolved in one pass. Components of a `k`-outcome
/// channel enter with prior `p/k`. Fails if a detector or observable depends
/// on a random measurement outcome.
pub fn extract_dem(circuit: &Circuit) -> Result<DetectorErrorModel, SimError> {
    let nd = circuit.num_detectors();
    let no = circuit.num_observables();
    let width = words_for(nd + no).max(1);
    let nm = circuit.num_measurements();

    // Which detectors / observables contain each measurement.
    let mut meas = vec![0u64; nm * width];
    let mut d = 0;
    for op in &circuit.ops {
        match op {
            Op::Detector(ms) => {
                for &m in ms {
                    meas[m * width + d / 64] ^= 1 << (d % 64);
                }
                d += 1;
            }
            Op::Observable(i, ms) => {
                let bit = nd + i;
                for &m in ms {
                    meas[m * width + bit / 64] ^= 1 << (bit % 64);
                }
            }
            _ => {}
        }
    }

    let nq = circuit.num_qubits;
    let mut s = Sensitivity {
        width,
        sx: vec![0; nq * width],
        sz: vec![0; nq * width],
    };
    let sites = fault_sites(circuit);
    let mut site_end = sites.len();
    let mut signatures: Vec<(f64, Vec<u64>)> = Vec::with_capacity(sites.len());
    let mut m_next = nm;
    let nonzero = |v: &[u64]| v.iter().any(|&w| w != 0);
    let first_bit = |v: &[u64]| -> usize {
        v.iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
            .unwrap_or(0)
    };

    for (i, op) in circuit.ops.iter().enumerate().rev() {
        // Faults attached to this op act after it, so resolve them first.
        while site_end > 0 && sites[site_end - 1].op == i {
            site_end -= 1;
            let site = &sites[site_end];
            let mut sig = vec![0u64; width];
            for &(q, p) in &site.paulis {
                s.of(q, p, &mut sig);
            }
            signatures.push((site.prob, sig));
        }
        match op {
            Op::R(qs) | Op::RX(qs) => {
                for &q in qs {
                    let trivial = if matches!(op, Op::R(_)) { s.z(q) } else { s.x(q) };
                    if nonzero(trivial) {
                        return Err(SimError::NonDeterministic(first_bit(trivial)));
                    }
                    s.clear(q);
                }
            }
            Op::M(qs) | Op::MX(qs) | Op::MR(qs) => {
                for &q in qs.iter().rev() {
                    m_next -= 1;
                    let is_x = matches!(op, Op::MX(_));
                    if matches!(op, Op::MR(_)) {
                        if nonzero(s.z(q)) {
                            return Err(SimError::NonDeterministic(first_bit(s.z(q))));
                        }
                        s.clear(q);
                    } else {
                        let trivial = if is_x { s.x(q) } else { s.z(q) };
                        if nonzero(trivial) {
                            return Err(SimError::NonDeterministic(first_bit(trivial)));
                        }
                    }
                    let sens = &meas[m_next * width..(m_next + 1) * width];
                    let w = s.width;
                    let target = if is_x {
                        &mut s.sz[q * w..(q + 1) * w]
                    } else {
                        &mut s.sx[q * w..(q + 1) * w]
                    };
                    xor(target, sens);
                }
            }
            Op::H(qs) => {
                let w = s.width;
                for &q in qs {
                    for k in 0..w {
                        std::mem::swap(&mut s.sx[q * w + k], &mut s.sz[q * w + k]);
                    }
                }
            }
            Op::CX(gates) => {
                let w = s.width;
                for &(c, t, _) in gates {
                    for k in 0..w {
                        s.sx[c * w + k] ^= s.sx[t * w + k];
                        s.sz[t * w + k] ^= s.sz[c * w + k];
                    }
                }
            }
            _ => {}
        }
    }
    // Every qubit starts in |0⟩.
    for q in 0..nq {
        if nonzero(s.z(q)) {
            return Err(SimError::NonDeterministic(first_bit(s.z(q))));
        }
    }

    let split = |sig: &[u64]| -> (Vec<usize>, Vec<usize>) {
        let mut dets = Vec::new();
        let mut obs = Vec::new();
        for (wi, &w) in sig.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = wi * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                if b < nd {
                    dets.push(b);
                } else {
                    obs.push(b - nd);
                }
            }
        }
        (dets, obs)
    };
    // Merge on packed signatures first; it is much cheaper than on index lists.
    let mut merged: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    for (p, sig) in signatures {
        if !nonzero(&sig) {
            continue;
        }
        let e = merged.entry(sig).or_insert(0.0);
        *e = xor_probability(*e, p);
    }
    DetectorErrorModel::from_components(
        nd,
        no,
        merged.into_iter().map(|(sig, p)| {
            let (d, o) = split(&sig);
            (p, d, o)
        }),
    )
}
