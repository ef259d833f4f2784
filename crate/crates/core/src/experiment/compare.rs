use serde::{Deserialize, Serialize};

use super::{family_code, open_manifest, Arm, ExperimentConfig, ExperimentError, FamilyConfig, RunOptions};
use crate::analysis::{
    crossing_point, curve_crossing, fit_subthreshold, sc_family_curve, Crossing, DecodingCurve, FitExponent,
    SubthresholdFit,
};
use crate::code::Boundary;

/// Surface-code copies standing in for an LDPC code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub distance: usize,
    pub copies: usize,
    pub qubits_per_copy: usize,
    pub total_qubits: usize,
    /// All copies fit into the LDPC qubit count.
    pub fits: bool,
}

/// Largest odd distance whose `copies` unrotated surface codes fit in
/// `num_qubits`. When no odd distance fits, distance 2 is used, with
/// `fits = false` if even that exceeds the budget.
pub fn surface_partition(num_qubits: usize, copies: usize) -> Partition {
    let size = |d: usize| d * d + (d - 1) * (d - 1);
    let mut best = None;
    let mut d = 3;
    while copies * size(d) <= num_qubits {
        best = Some(d);
        d += 2;
    }
    let distance = best.unwrap_or(2);
    Partition {
        distance,
        copies,
        qubits_per_copy: size(distance),
        total_qubits: copies * size(distance),
        fits: copies * size(distance) <= num_qubits,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub partition: Partition,
    pub rounds: usize,
    pub ldpc: DecodingCurve,
    pub surface_single: DecodingCurve,
    pub surface_family: DecodingCurve,
    /// Raw-curve crossing in log-log interpolation.
    pub empirical_crossing: Option<f64>,
    pub ldpc_fit: Option<SubthresholdFit>,
    pub surface_fit: Option<SubthresholdFit>,
    /// Power-law crossing from the two fits, both expressed at the LDPC size.
    pub closed_form: Option<Crossing>,
}

/// Runs the first family size against `K` surface-code copies, both for
/// `D_ldpc` rounds.
pub fn run_comparison(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ComparisonReport, ExperimentError> {
    cfg.validate()?;
    let mut manifest = open_manifest(cfg)?;
    let n = cfg.family.sizes[0];
    let code = family_code(&cfg.family, n)?;
    let rounds = cfg.rounds.unwrap_or_else(|| code.distance().unwrap_or(1).max(1));
    let partition = surface_partition(code.n, code.k);
    if opts.verbose && !partition.fits {
        eprintln!(
            "no surface-code partition fits {} qubits; using {} copies of distance {} ({} qubits)",
            code.n, partition.copies, partition.distance, partition.total_qubits
        );
    }
    let num_qubits = code.n;
    let ldpc_arm = Arm::new(&cfg.family.name, cfg.family.k, n, code, rounds)?;
    let ldpc = ldpc_arm.sweep(cfg, &cfg.decoder, opts, &mut manifest)?;

    let sc_family = FamilyConfig {
        name: format!("surface-d{}", partition.distance),
        k: 1,
        sizes: vec![partition.distance],
        boundary: Boundary::Open,
        layout: None,
        poly: None,
    };
    let sc_code = family_code(&sc_family, partition.distance)?;
    let sc_arm = Arm::new(&sc_family.name, 1, partition.distance, sc_code, rounds)?;
    let surface_single = sc_arm.sweep(cfg, &cfg.baseline_decoder, opts, &mut manifest)?;
    let surface_family = sc_family_curve(&surface_single, partition.copies);

    // Any reference rate above the grid works: the crossing of two power
    // laws does not depend on where their prefactors are quoted.
    let p_ref = cfg.noise.p.last().copied().unwrap_or(1.0) * (1.0 + 1e-9);
    let ldpc_fit = fit_subthreshold(&ldpc, p_ref, FitExponent::Effective).ok();
    let surface_fit = fit_subthreshold(&surface_family, p_ref, FitExponent::Effective).ok();
    let root_n = (num_qubits as f64).sqrt();
    let closed_form = match (&ldpc_fit, &surface_fit) {
        (Some(l), Some(s)) => {
            crossing_point((l.a, p_ref, l.slope / root_n), (s.a, p_ref, s.slope / root_n), num_qubits).ok()
        }
        _ => None,
    };
    let report = ComparisonReport {
        partition,
        rounds,
        empirical_crossing: curve_crossing(&ldpc, &surface_family),
        ldpc,
        surface_single,
        surface_family,
        ldpc_fit,
        surface_fit,
        closed_form,
    };
    if let Some(path) = &cfg.output.csv {
        super::write_csv(path, &[report.ldpc.clone(), report.surface_family.clone()])?;
    }
    if let Some(path) = &cfg.output.report {
        super::write_file(path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    }
    Ok(report)
}
