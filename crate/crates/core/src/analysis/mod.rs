//! Logical error statistics: per-round normalization, thresholds,
//! sub-threshold fits and the LDPC/surface-code crossing point.

mod fit;
mod threshold;

pub use fit::{crossing_point, fit_subthreshold, lambda_k, Crossing, FitExponent, SubthresholdFit};
pub use threshold::{curve_crossing, estimate_threshold, Threshold};

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("curves never cross in the sampled range")]
    NoCrossing,
    #[error("need at least 2 usable points, found {0}")]
    InsufficientData(usize),
    #[error("need at least 2 curves of different size")]
    TooFewCurves,
    #[error("exponents coincide; no unique crossing")]
    DegenerateExponents,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Probability of a logical failure per round given the failure
/// probability `p_l` accumulated over `rounds` rounds.
pub fn per_round_logical(p_l: f64, rounds: usize) -> f64 {
    assert!(rounds >= 1);
    if p_l <= 0.0 {
        return 0.0;
    }
    1.0 - (1.0 - p_l).powf(1.0 / rounds as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub shots: u64,
    pub failures: u64,
    /// Failure probability over the whole experiment.
    pub p_l: f64,
    /// Per-round failure probability.
    pub per_round: f64,
    pub stderr: f64,
}

impl CurvePoint {
    pub fn new(p: f64, shots: u64, failures: u64, rounds: usize) -> Self {
        assert!(shots > 0 && failures <= shots);
        let p_l = failures as f64 / shots as f64;
        let per_round = per_round_logical(p_l, rounds);
        Self {
            p,
            shots,
            failures,
            p_l,
            per_round,
            stderr: (per_round * (1.0 - per_round) / shots as f64).sqrt(),
        }
    }
}

/// Sampled logical error rates of one code under one noise model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodingCurve {
    pub family: String,
    /// Seed parameter `k` (1 for surface codes).
    pub k: usize,
    pub n: usize,
    pub num_qubits: usize,
    pub num_logicals: usize,
    pub distance: usize,
    pub noise: String,
    pub rounds: usize,
    pub points: Vec<CurvePoint>,
}

impl DecodingCurve {
    pub fn label(&self) -> String {
        format!("[[{},{},{}]]", self.num_qubits, self.num_logicals, self.distance)
    }
}

/// Logical error rate of `copies` independent copies of a code.
pub fn sc_family_curve(single: &DecodingCurve, copies: usize) -> DecodingCurve {
    assert!(copies >= 1);
    let kf = copies as f64;
    let combine = |q: f64| 1.0 - (1.0 - q).powi(copies as i32);
    let points = single
        .points
        .iter()
        .map(|pt| {
            let per_round = combine(pt.per_round);
            CurvePoint {
                p: pt.p,
                shots: pt.shots,
                failures: pt.failures,
                p_l: combine(pt.p_l),
                per_round,
                stderr: kf * (1.0 - pt.per_round).powi(copies as i32 - 1) * pt.stderr,
            }
        })
        .collect();
    DecodingCurve {
        family: format!("{}-x{copies}", single.family),
        num_qubits: single.num_qubits * copies,
        num_logicals: single.num_logicals * copies,
        points,
        ..single.clone()
    }
}

#[derive(Serialize, Deserialize)]
struct Row {
    family: String,
    k: usize,
    n: usize,
    #[serde(rename = "N")]
    num_qubits: usize,
    #[serde(rename = "K")]
    num_logicals: usize,
    #[serde(rename = "D")]
    distance: usize,
    noise: String,
    p: f64,
    shots: u64,
    failures: u64,
    #[serde(rename = "p_L")]
    p_l: f64,
    #[serde(rename = "P_L")]
    per_round: f64,
    stderr: f64,
}

/// Writes one CSV row per point, header included.
pub fn write_curves_csv(w: impl Write, curves: &[DecodingCurve]) -> Result<(), AnalysisError> {
    let mut out = csv::Writer::from_writer(w);
    for c in curves {
        for pt in &c.points {
            out.serialize(Row {
                family: c.family.clone(),
                k: c.k,
                n: c.n,
                num_qubits: c.num_qubits,
                num_logicals: c.num_logicals,
                distance: c.distance,
                noise: c.noise.clone(),
                p: pt.p,
                shots: pt.shots,
                failures: pt.failures,
                p_l: pt.p_l,
                per_round: pt.per_round,
                stderr: pt.stderr,
            })?;
        }
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Groups rows back into curves keyed by (family, n, noise), in order of
/// first appearance.
pub fn read_curves_csv(r: impl Read) -> Result<Vec<DecodingCurve>, AnalysisError> {
    let mut curves: Vec<DecodingCurve> = Vec::new();
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: Row = row?;
        // The round count is implied by the two failure rates.
        let rounds = if row.p_l > 0.0 && row.per_round > 0.0 && row.p_l < 1.0 {
            ((1.0 - row.p_l).ln() / (1.0 - row.per_round).ln()).round() as usize
        } else {
            row.distance
        }
        .max(1);
        let pt = CurvePoint {
            p: row.p,
            shots: row.shots,
            failures: row.failures,
            p_l: row.p_l,
            per_round: row.per_round,
            stderr: row.stderr,
        };
        match curves
            .iter_mut()
            .find(|c| c.family == row.family && c.n == row.n && c.noise == row.noise)
        {
            Some(c) => c.points.push(pt),
            None => curves.push(DecodingCurve {
                family: row.family,
                k: row.k,
                n: row.n,
                num_qubits: row.num_qubits,
                num_logicals: row.num_logicals,
                distance: row.distance,
                noise: row.noise,
                rounds,
                points: vec![pt],
            }),
        }
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_round_examples() {
        assert_eq!(per_round_logical(0.0, 4), 0.0);
        assert!((per_round_logical(0.3, 1) - 0.3).abs() < 1e-15);
        let q: f64 = 0.01;
        assert!((per_round_logical(1.0 - (1.0 - q).powi(5), 5) - q).abs() < 1e-14);
    }

    fn curve(points: &[(f64, u64, u64)]) -> DecodingCurve {
        DecodingCurve {
            family: "surface".into(),
            k: 1,
            n: 3,
            num_qubits: 13,
            num_logicals: 1,
            distance: 3,
            noise: "agnostic".into(),
            rounds: 3,
            points: points.iter().map(|&(p, s, f)| CurvePoint::new(p, s, f, 3)).collect(),
        }
    }

    #[test]
    fn copies_combine() {
        let mut c = curve(&[(0.001, 1000, 3)]);
        c.points[0].per_round = 1e-3;
        let nine = sc_family_curve(&c, 9);
        assert!((nine.points[0].per_round - 8.964e-3).abs() < 1e-6);
        assert_eq!(nine.num_qubits, 117);
        let one = sc_family_curve(&c, 1);
        assert!((one.points[0].per_round - c.points[0].per_round).abs() < 1e-15);
        assert_eq!(one.points[0].stderr, c.points[0].stderr);
        let zero = curve(&[(0.001, 1000, 0)]);
        assert_eq!(sc_family_curve(&zero, 9).points[0].per_round, 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let c = curve(&[(0.001, 1000, 3), (0.002, 2000, 40)]);
        let mut buf = Vec::new();
        write_curves_csv(&mut buf, std::slice::from_ref(&c)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("family,k,n,N,K,D,noise,p,shots,failures,p_L,P_L,stderr\n"));
        let back = read_curves_csv(buf.as_slice()).unwrap();
        assert_eq!(back, vec![c]);
    }
}
