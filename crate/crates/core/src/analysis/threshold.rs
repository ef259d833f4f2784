use serde::{Deserialize, Serialize};

use super::{AnalysisError, DecodingCurve};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub p_th: f64,
    /// Smallest and largest pairwise crossing.
    pub bracket: (f64, f64),
    /// Pairwise crossings as `(n_small, n_large, p)`.
    pub crossings: Vec<(usize, usize, f64)>,
}

impl Threshold {
    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// Pairwise crossings that differ by more than this factor count as drift.
const AGREEMENT: f64 = 1.25;

/// First crossing of two per-round curves in log-log space, interpolated
/// linearly between the bracketing physical error rates both curves share.
pub fn curve_crossing(a: &DecodingCurve, b: &DecodingCurve) -> Option<f64> {
    let mut shared: Vec<(f64, f64, f64)> = a
        .points
        .iter()
        .filter(|pa| pa.per_round > 0.0)
        .filter_map(|pa| {
            b.points
                .iter()
                .find(|pb| pb.p == pa.p && pb.per_round > 0.0)
                .map(|pb| (pa.p.ln(), pa.per_round.ln(), pb.per_round.ln()))
        })
        .collect();
    shared.sort_by(|x, y| x.0.total_cmp(&y.0));
    for w in shared.windows(2) {
        let g0 = w[0].1 - w[0].2;
        let g1 = w[1].1 - w[1].2;
        if g0 == 0.0 {
            return Some(w[0].0.exp());
        }
        if g0.signum() != g1.signum() {
            let t = g0 / (g0 - g1);
            return Some((w[0].0 + t * (w[1].0 - w[0].0)).exp());
        }
    }
    shared
        .last()
        .filter(|l| l.1 == l.2)
        .map(|l| l.0.exp())
}

/// Locates the threshold of a code family from curves of several sizes.
///
/// The estimate is the geometric mean of all pairwise crossings, or the
/// crossing of the two largest codes when the pairwise values drift apart.
pub fn estimate_threshold(curves: &[DecodingCurve]) -> Result<Threshold, AnalysisError> {
    let mut sorted: Vec<&DecodingCurve> = curves.iter().collect();
    sorted.sort_by_key(|c| (c.num_qubits, c.n));
    sorted.dedup_by_key(|c| c.num_qubits);
    if sorted.len() < 2 {
        return Err(AnalysisError::TooFewCurves);
    }
    let mut crossings = Vec::new();
    for i in 0..sorted.len() {
        for j in i + 1..sorted.len() {
            if let Some(p) = curve_crossing(sorted[i], sorted[j]) {
                crossings.push((sorted[i].n, sorted[j].n, p));
            }
        }
    }
    if crossings.is_empty() {
        return Err(AnalysisError::NoCrossing);
    }
    let lo = crossings.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let hi = crossings.iter().map(|c| c.2).fold(0.0, f64::max);
    let largest = (sorted[sorted.len() - 2].n, sorted[sorted.len() - 1].n);
    let p_th = match crossings.iter().find(|c| (c.0, c.1) == largest) {
        Some(c) if hi / lo > AGREEMENT => c.2,
        _ => {
            let mean_log = crossings.iter().map(|c| c.2.ln()).sum::<f64>() / crossings.len() as f64;
            mean_log.exp()
        }
    };
    Ok(Threshold {
        p_th,
        bracket: (lo, hi),
        crossings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::CurvePoint;

    fn power_curve(n: usize, d: i32, p0: f64, ps: &[f64]) -> DecodingCurve {
        DecodingCurve {
            family: "synthetic".into(),
            k: 2,
            n,
            num_qubits: n * n,
            num_logicals: 4,
            distance: d as usize,
            noise: "agnostic".into(),
            rounds: 1,
            points: ps
                .iter()
                .map(|&p| CurvePoint {
                    p,
                    shots: 1,
                    failures: 0,
                    p_l: 0.0,
                    per_round: 0.01 * (p / p0).powi(d),
                    stderr: 0.0,
                })
                .collect(),
        }
    }

    #[test]
    fn synthetic_threshold_recovered() {
        let ps = [0.001, 0.002, 0.003, 0.005, 0.008];
        let curves: Vec<_> = (2..5).map(|d| power_curve(3 + d as usize, d, 0.004, &ps)).collect();
        let t = estimate_threshold(&curves).unwrap();
        assert!((t.p_th - 0.004).abs() < 1e-12, "{}", t.p_th);
        assert_eq!(t.crossings.len(), 3);
        let mut rev = curves.clone();
        rev.reverse();
        assert_eq!(estimate_threshold(&rev).unwrap(), t);
    }

    #[test]
    fn parallel_curves_never_cross() {
        let ps = [0.001, 0.002];
        let a = power_curve(5, 2, 0.004, &ps);
        let mut b = power_curve(7, 2, 0.004, &ps);
        for pt in &mut b.points {
            pt.per_round *= 0.5;
        }
        assert!(matches!(estimate_threshold(&[a, b]), Err(AnalysisError::NoCrossing)));
    }
}
