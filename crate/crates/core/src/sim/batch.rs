use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::gf2::words_for;

/// Sampled detector and observable bits, one packed row per shot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotBatch {
    pub shots: usize,
    pub num_detectors: usize,
    pub num_observables: usize,
    pub seed: u64,
    /// `shots × words_for(num_detectors)` words, shot-major.
    pub detectors: Vec<u64>,
    pub observables: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    shots: usize,
    detectors: usize,
    observables: usize,
    seed: u64,
}

impl ShotBatch {
    pub fn zeros(shots: usize, num_detectors: usize, num_observables: usize, seed: u64) -> Self {
        Self {
            shots,
            num_detectors,
            num_observables,
            seed,
            detectors: vec![0; shots * words_for(num_detectors)],
            observables: vec![0; shots * words_for(num_observables)],
        }
    }

    pub fn detector_row(&self, shot: usize) -> &[u64] {
        let w = words_for(self.num_detectors);
        &self.detectors[shot * w..(shot + 1) * w]
    }

    pub fn observable_row(&self, shot: usize) -> &[u64] {
        let w = words_for(self.num_observables);
        &self.observables[shot * w..(shot + 1) * w]
    }

    /// Indices of fired detectors in one shot.
    pub fn fired(&self, shot: usize) -> Vec<usize> {
        ones(self.detector_row(shot))
    }

    pub fn flipped_observables(&self, shot: usize) -> Vec<usize> {
        ones(self.observable_row(shot))
    }

    /// Appends the shots of `other`, which must have the same widths.
    pub fn extend(&mut self, other: &ShotBatch) {
        assert_eq!(self.num_detectors, other.num_detectors);
        assert_eq!(self.num_observables, other.num_observables);
        self.shots += other.shots;
        self.detectors.extend_from_slice(&other.detectors);
        self.observables.extend_from_slice(&other.observables);
    }

    /// JSON header line, then per shot the detector bits and the observable
    /// bits, each packed little-endian into whole bytes.
    pub fn write_to(&self, mut w: impl Write) -> Result<(), SimError> {
        let header = Header {
            shots: self.shots,
            detectors: self.num_detectors,
            observables: self.num_observables,
            seed: self.seed,
        };
        let json = serde_json::to_string(&header).map_err(|e| SimError::Parse {
            line: 0,
            message: e.to_string(),
        })?;
        writeln!(w, "{json}")?;
        let db = self.num_detectors.div_ceil(8);
        let ob = self.num_observables.div_ceil(8);
        let mut buf = Vec::with_capacity(self.shots * (db + ob));
        for s in 0..self.shots {
            push_bytes(&mut buf, self.detector_row(s), db);
            push_bytes(&mut buf, self.observable_row(s), ob);
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(r: impl Read) -> Result<Self, SimError> {
        let mut r = std::io::BufReader::new(r);
        let mut line = String::new();
        r.read_line(&mut line)?;
        let h: Header = serde_json::from_str(line.trim()).map_err(|e| SimError::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        let mut out = ShotBatch::zeros(h.shots, h.detectors, h.observables, h.seed);
        let db = h.detectors.div_ceil(8);
        let ob = h.observables.div_ceil(8);
        let dw = words_for(h.detectors);
        let ow = words_for(h.observables);
        let mut row = vec![0u8; db + ob];
        for s in 0..h.shots {
            r.read_exact(&mut row)?;
            unpack(&row[..db], &mut out.detectors[s * dw..(s + 1) * dw]);
            unpack(&row[db..], &mut out.observables[s * ow..(s + 1) * ow]);
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(SimError::Parse {
                line: 0,
                message: format!("{} trailing bytes after {} shots", rest.len(), h.shots),
            });
        }
        Ok(out)
    }
}

fn ones(words: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &w) in words.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            out.push(i * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
    out
}

fn push_bytes(buf: &mut Vec<u8>, words: &[u64], nbytes: usize) {
    buf.extend(
        words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(nbytes),
    );
}

fn unpack(bytes: &[u8], words: &mut [u64]) {
    for (i, &b) in bytes.iter().enumerate() {
        words[i / 8] |= (b as u64) << (8 * (i % 8));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_round_trip() {
        let mut b = ShotBatch::zeros(3, 70, 2, 9);
        b.detectors[0] = 0b101;
        b.detectors[3] = 1 << 5; // shot 1, detector 69
        b.observables[2] = 0b10;
        let mut buf = Vec::new();
        b.write_to(&mut buf).unwrap();
        let back = ShotBatch::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.fired(1), vec![69]);
        assert_eq!(back.flipped_observables(2), vec![1]);
    }

    #[test]
    fn truncated_file_is_an_error() {
        let b = ShotBatch::zeros(4, 10, 1, 0);
        let mut buf = Vec::new();
        b.write_to(&mut buf).unwrap();
        buf.pop();
        assert!(ShotBatch::read_from(buf.as_slice()).is_err());
    }
}
