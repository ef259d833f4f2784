use lacross::decoder::{bp_minsum, decode_batch_with, Decoder, DecoderConfig, OsdMode};
use lacross::gf2::{BinaryMatrix, BitVector};
use lacross::par::Parallelism;
use lacross::sim::{DetectorErrorModel, ShotBatch};
use proptest::prelude::*;

fn random_dem() -> impl Strategy<Value = (DetectorErrorModel, Vec<usize>)> {
    (3usize..10, 4usize..16).prop_flat_map(|(m, n)| {
        (
            proptest::collection::vec(proptest::collection::btree_set(0..m, 1..4), n),
            proptest::collection::vec(0.01f64..0.3, n),
            proptest::collection::btree_set(0..n, 0..4),
        )
            .prop_map(move |(cols, priors, err)| {
                let entries = cols
                    .iter()
                    .enumerate()
                    .flat_map(|(j, c)| c.iter().map(move |&r| (r, j)));
                let h = BinaryMatrix::new(m, n, entries).unwrap();
                let logical = BitVector::from_positions(n, 0..n / 2);
                let mut dem = DetectorErrorModel::code_capacity(&h, &[logical], 0.1);
                for (mech, p) in dem.mechanisms.iter_mut().zip(priors) {
                    mech.prior = p;
                }
                let err = err.into_iter().filter(|&j| j < dem.len()).collect();
                (dem, err)
            })
    })
}

fn syndrome(dem: &DetectorErrorModel, err: &[usize]) -> Vec<usize> {
    let mut s = BitVector::zeros(dem.num_detectors);
    for &j in err {
        for &d in &dem.mechanisms[j].detectors {
            s.toggle(d);
        }
    }
    s.ones().collect()
}

proptest! {
    #[test]
    fn osd_always_explains_reachable_syndromes((dem, err) in random_dem()) {
        for mode in [OsdMode::Osd0, OsdMode::Cs] {
            let cfg = DecoderConfig { osd_mode: mode, ..DecoderConfig::default() };
            let d = Decoder::new(&dem, cfg);
            let fired = syndrome(&dem, &err);
            let r = d.decode(&mut d.workspace(), &fired);
            prop_assert!(r.valid);
            prop_assert_eq!(syndrome(&dem, &r.correction), fired);
        }
    }

    #[test]
    fn sweep_never_costs_more_than_osd0((dem, err) in random_dem()) {
        let weight = |c: &[usize]| -> f64 {
            c.iter().map(|&j| { let p = dem.mechanisms[j].prior; ((1.0 - p) / p).ln() }).sum()
        };
        let fired = syndrome(&dem, &err);
        let d0 = Decoder::new(&dem, DecoderConfig { osd_mode: OsdMode::Osd0, bp_iterations: 1, ..DecoderConfig::default() });
        let dc = Decoder::new(&dem, DecoderConfig { bp_iterations: 1, ..DecoderConfig::default() });
        let a = d0.decode(&mut d0.workspace(), &fired);
        let b = dc.decode(&mut dc.workspace(), &fired);
        if !a.converged {
            prop_assert!(weight(&b.correction) <= weight(&a.correction) + 1e-9);
        }
    }

    #[test]
    fn uniform_prior_scale_does_not_change_decisions(
        (dem, err) in random_dem(),
        q1 in 0.01f64..0.4,
        q2 in 0.01f64..0.4,
    ) {
        let uniform = |q: f64| {
            let mut d = dem.clone();
            for m in &mut d.mechanisms {
                m.prior = q;
            }
            d
        };
        let mut s = BitVector::zeros(dem.num_detectors);
        for d in syndrome(&dem, &err) {
            s.toggle(d);
        }
        let cfg = DecoderConfig::default();
        let a = bp_minsum(&uniform(q1), &s, &cfg);
        let b = bp_minsum(&uniform(q2), &s, &cfg);
        // Posteriors are multiples of the common LLR; skip exact ties that
        // rounding may push either way.
        let l1 = ((1.0 - q1) / q1).ln();
        let l2 = ((1.0 - q2) / q2).ln();
        let near_tie = a.posterior.iter().any(|x| x.abs() < 1e-9 * l1)
            || b.posterior.iter().any(|x| x.abs() < 1e-9 * l2);
        if !near_tie {
            prop_assert_eq!(a.hard, b.hard);
            prop_assert_eq!(a.converged, b.converged);
        }
    }

    #[test]
    fn converged_bp_is_returned_unchanged((dem, err) in random_dem()) {
        let mut s = BitVector::zeros(dem.num_detectors);
        for d in syndrome(&dem, &err) {
            s.toggle(d);
        }
        for mode in [OsdMode::Osd0, OsdMode::Cs] {
            let cfg = DecoderConfig { osd_mode: mode, ..DecoderConfig::default() };
            let bp = bp_minsum(&dem, &s, &cfg);
            let d = Decoder::new(&dem, cfg);
            let r = d.decode(&mut d.workspace(), &s.ones().collect::<Vec<_>>());
            prop_assert_eq!(r.converged, bp.converged);
            if bp.converged {
                prop_assert_eq!(r.correction, bp.hard.ones().collect::<Vec<_>>());
            }
        }
    }
}

#[test]
fn degree_one_mechanism_flips_after_one_iteration() {
    // Detector 0 sees a likely degree-1 mechanism and an unlikely shared one.
    let mut dem = DetectorErrorModel::code_capacity(
        &BinaryMatrix::new(2, 2, [(0, 0), (0, 1), (1, 1)]).unwrap(),
        &[BitVector::zeros(2)],
        0.1,
    );
    dem.mechanisms[0].prior = 0.2;
    dem.mechanisms[1].prior = 0.05;
    let s = BitVector::from_positions(2, [0]);
    let out = bp_minsum(&dem, &s, &DecoderConfig { bp_iterations: 1, ..DecoderConfig::default() });
    assert!(out.posterior[0] < 0.0, "{:?}", out.posterior);
    assert!(out.hard.get(0) && !out.hard.get(1));
    assert!(out.converged);
}

#[test]
fn batch_decoding_is_parallel_invariant() {
    let h = BinaryMatrix::new(
        4,
        5,
        (0..4).flat_map(|i| [(i, i), (i, i + 1)]),
    )
    .unwrap();
    let dem = DetectorErrorModel::code_capacity(&h, &[BitVector::from_positions(5, [0])], 0.1);
    let mut batch = ShotBatch::zeros(300, 4, 1, 0);
    for s in 0..300 {
        batch.detectors[s] = (s as u64 * 7) % 16;
        batch.observables[s] = (s as u64) & 1;
    }
    let cfg = DecoderConfig::default();
    let a = decode_batch_with(&dem, &batch, &cfg, Parallelism::Sequential);
    let b = decode_batch_with(&dem, &batch, &cfg, Parallelism::Parallel);
    assert_eq!(a, b);
    assert_eq!(a.shots, 300);
    assert_eq!(a.invalid, 0);
}
