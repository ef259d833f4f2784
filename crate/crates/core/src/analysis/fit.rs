use serde::{Deserialize, Serialize};

use super::{AnalysisError, DecodingCurve};

/// Exponent used for the constrained fit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitExponent {
    /// `⌊(D + 1) / 2⌋`.
    #[default]
    Effective,
    /// `α·D` for the given `α`.
    Alpha(f64),
}

/// Power-law fit `P_L ≈ A (p / p_th)^slope` below threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubthresholdFit {
    #[serde(rename = "A")]
    pub a: f64,
    pub p_th: f64,
    #[serde(rename = "D_e")]
    pub d_e: usize,
    pub beta: f64,
    pub lambda_k: f64,
    /// Weighted sum of squared residuals of the free fit in log space.
    pub residual: f64,
    /// Free-fit exponent.
    pub slope: f64,
    /// Constrained exponent and the prefactor fitted with it.
    pub constrained_slope: f64,
    pub constrained_a: f64,
    pub points_used: usize,
}

/// Geometry constant `λ` with `N = (λD − k)² + (λD)²`.
pub fn lambda_k(k: usize, num_qubits: usize, distance: usize) -> f64 {
    let k = k as f64;
    (k + (2.0 * num_qubits as f64 - k * k).sqrt()) / (2.0 * distance as f64)
}

/// Weighted least squares of `ln P_L` against `ln p` over the nonzero
/// points strictly below `p_th`.
pub fn fit_subthreshold(
    curve: &DecodingCurve,
    p_th: f64,
    exponent: FitExponent,
) -> Result<SubthresholdFit, AnalysisError> {
    let pts: Vec<(f64, f64, f64)> = curve
        .points
        .iter()
        .filter(|pt| pt.p < p_th && pt.per_round > 0.0)
        .map(|pt| {
            // Var(ln P) ≈ (σ/P)²; exact synthetic data gets unit weight.
            let w = if pt.stderr > 0.0 {
                (pt.per_round / pt.stderr).powi(2)
            } else {
                1.0
            };
            (pt.p.ln(), pt.per_round.ln(), w)
        })
        .collect();
    if pts.len() < 2 {
        return Err(AnalysisError::InsufficientData(pts.len()));
    }
    let sw: f64 = pts.iter().map(|q| q.2).sum();
    let mx = pts.iter().map(|q| q.2 * q.0).sum::<f64>() / sw;
    let my = pts.iter().map(|q| q.2 * q.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|q| q.2 * (q.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|q| q.2 * (q.0 - mx) * (q.1 - my)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::InsufficientData(1));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts
        .iter()
        .map(|q| q.2 * (q.1 - intercept - slope * q.0).powi(2))
        .sum();
    let d_e = (curve.distance + 1) / 2;
    let constrained_slope = match exponent {
        FitExponent::Effective => d_e as f64,
        FitExponent::Alpha(alpha) => alpha * curve.distance as f64,
    };
    let constrained_intercept = my - constrained_slope * mx;
    let ln_th = p_th.ln();
    Ok(SubthresholdFit {
        a: (intercept + slope * ln_th).exp(),
        p_th,
        d_e,
        beta: slope / (curve.num_qubits as f64).sqrt(),
        lambda_k: lambda_k(curve.k, curve.num_qubits, curve.distance),
        residual,
        slope,
        constrained_slope,
        constrained_a: (constrained_intercept + constrained_slope * ln_th).exp(),
        points_used: pts.len(),
    })
}

/// Where `A_sc (p/p_sc)^{β_sc √N}` meets `A_ldpc (p/p_ldpc)^{β_ldpc √N}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub p_star: f64,
    /// Value approached as `N → ∞`.
    pub limit: f64,
}

pub fn crossing_point(
    ldpc: (f64, f64, f64),
    sc: (f64, f64, f64),
    num_qubits: usize,
) -> Result<Crossing, AnalysisError> {
    let (a_l, p_l, b_l) = ldpc;
    let (a_s, p_s, b_s) = sc;
    let db = b_s - b_l;
    if db == 0.0 {
        return Err(AnalysisError::DegenerateExponents);
    }
    let limit = ((b_s * p_s.ln() - b_l * p_l.ln()) / db).exp();
    let correction = ((a_l / a_s).ln() / (db * (num_qubits as f64).sqrt())).exp();
    Ok(Crossing {
        p_star: limit * correction,
        limit,
    })
}
