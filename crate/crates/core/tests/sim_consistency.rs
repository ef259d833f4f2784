use lacross::circuit::{build_syndrome_circuit, instrument, MemoryBasis, NoiseModel};
use lacross::code::{build_seed, hypergraph_product, Boundary, CssCode};
use lacross::sim::{extract_dem, fault_sites, inject_fault, sample, DetectorErrorModel, Pauli};

fn code(n: usize, k: usize) -> CssCode {
    let s = build_seed(n, k, Boundary::Open).unwrap();
    hypergraph_product(&s, &s).unwrap()
}

fn noisy(c: &CssCode, rounds: usize, model: &NoiseModel) -> lacross::circuit::Circuit {
    let skel = build_syndrome_circuit(c, c.layout.as_ref().unwrap(), rounds, MemoryBasis::Z).unwrap();
    instrument(&skel, model).unwrap()
}

/// Builds the DEM by forward-simulating every fault component separately.
fn dem_by_injection(circuit: &lacross::circuit::Circuit) -> DetectorErrorModel {
    let comps = fault_sites(circuit).into_iter().map(|site| {
        let (d, o) = inject_fault(circuit, &site);
        (site.prob, d, o)
    });
    DetectorErrorModel::from_components(circuit.num_detectors(), circuit.num_observables(), comps)
        .unwrap()
}

#[test]
fn injection_matches_backward_extraction() {
    let c = code(3, 1);
    for model in [
        NoiseModel::hardware_agnostic(0.01).unwrap(),
        NoiseModel::hardware_specific(0.005, &lacross::circuit::DEFAULT_RANGE_CONSTANTS).unwrap(),
    ] {
        let circ = noisy(&c, 3, &model);
        let forward = dem_by_injection(&circ);
        let backward = extract_dem(&circ).unwrap();
        assert_eq!(forward.mechanisms.len(), backward.mechanisms.len());
        for (a, b) in forward.mechanisms.iter().zip(&backward.mechanisms) {
            assert_eq!((&a.detectors, &a.observables), (&b.detectors, &b.observables));
            assert!((a.prior - b.prior).abs() < 1e-15);
        }
    }
}

#[test]
fn la_cross_dem_matches_injection() {
    let c = code(5, 2);
    let circ = noisy(&c, 2, &NoiseModel::hardware_agnostic(0.002).unwrap());
    assert_eq!(dem_by_injection(&circ), extract_dem(&circ).unwrap());
}

#[test]
fn noiseless_sampling_is_silent() {
    let c = code(7, 3);
    let circ = noisy(&c, 2, &NoiseModel::noiseless());
    let batch = sample(&circ, 500, 11).unwrap();
    assert!(batch.detectors.iter().all(|&w| w == 0));
    assert!(batch.observables.iter().all(|&w| w == 0));
}

#[test]
fn bulk_data_x_error_fires_two_detector_pairs() {
    // Surface code: an X flip on the central data qubit between rounds
    // anticommutes with its two Z neighbours, firing each once in the next round.
    let c = code(3, 1);
    let rounds = 3;
    let circ = noisy(&c, rounds, &NoiseModel::noiseless());
    let origin = c.origin.as_ref().unwrap();
    let q = origin.primal_index(1, 1);
    let first_readout = circ
        .ops
        .iter()
        .enumerate()
        .filter(|(_, op)| matches!(op, lacross::circuit::Op::MR(_)))
        .map(|(i, _)| i)
        .next()
        .unwrap();
    let site = lacross::sim::FaultSite {
        op: first_readout,
        paulis: vec![(q, Pauli::X)],
        prob: 1.0,
    };
    let (dets, obs) = inject_fault(&circ, &site);
    let nz = c.hz.rows();
    let touched: Vec<usize> = (0..nz).filter(|&r| c.hz.row(r).contains(&q)).collect();
    assert_eq!(touched.len(), 2);
    let want: Vec<usize> = touched.iter().map(|&r| nz + r).collect();
    assert_eq!(dets, want);
    let flipped: Vec<usize> = (0..c.k).filter(|&o| c.logicals_z[o].get(q)).collect();
    assert_eq!(obs, flipped);
}

#[test]
fn detector_marginals_match_sampling() {
    let c = code(3, 1);
    let circ = noisy(&c, 3, &NoiseModel::hardware_agnostic(0.004).unwrap());
    let dem = extract_dem(&circ).unwrap();
    let shots = 100_000;
    let batch = sample(&circ, shots, 2024).unwrap();
    let mut counts = vec![0usize; dem.num_detectors];
    for s in 0..shots {
        for d in batch.fired(s) {
            counts[d] += 1;
        }
    }
    for (d, q) in dem.detector_marginals().into_iter().enumerate() {
        let sigma = (q * (1.0 - q) / shots as f64).sqrt();
        let rate = counts[d] as f64 / shots as f64;
        assert!((rate - q).abs() < 5.0 * sigma + 1e-12, "detector {d}: {rate} vs {q}");
    }
}
