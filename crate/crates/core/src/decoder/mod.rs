//! Min-sum belief propagation with ordered-statistics post-processing.

mod bp;
mod osd;

pub use bp::{bp_minsum, BpOutput};
pub use osd::osd_postprocess;

use serde::{Deserialize, Serialize};

use crate::gf2::{words_for, BitVector};
use crate::par::{map_indices, Parallelism};
use crate::sim::{DetectorErrorModel, ShotBatch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OsdMode {
    Off,
    Osd0,
    /// Combination sweep.
    Cs,
}

impl std::str::FromStr for OsdMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "off" | "none" => Ok(OsdMode::Off),
            "osd0" | "0" => Ok(OsdMode::Osd0),
            "cs" | "combination-sweep" => Ok(OsdMode::Cs),
            other => Err(format!("unknown OSD mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecoderConfig {
    pub bp_iterations: usize,
    /// Multiplies every check-to-variable message; in `(0, 1]`.
    pub scaling_factor: f64,
    pub osd_mode: OsdMode,
    /// Combination-sweep order `λ`. `λ = 0` is plain OSD-0.
    pub osd_order: usize,
    /// Number of most likely non-basis columns tried as single flips;
    /// `None` tries all of them.
    pub cs_window: Option<usize>,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            bp_iterations: 4,
            scaling_factor: 1.0,
            osd_mode: OsdMode::Cs,
            osd_order: 1,
            cs_window: None,
        }
    }
}

impl DecoderConfig {
    /// Settings used for surface-code baselines.
    pub fn surface_code() -> Self {
        Self {
            scaling_factor: 0.625,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.scaling_factor > 0.0 && self.scaling_factor <= 1.0) {
            return Err(format!(
                "scaling factor {} outside (0, 1]",
                self.scaling_factor
            ));
        }
        if self.bp_iterations == 0 {
            return Err("need at least one BP iteration".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub observables: BitVector,
    /// BP alone produced a syndrome-consistent decision.
    pub converged: bool,
    /// The returned correction reproduces the syndrome.
    pub valid: bool,
    /// Mechanism indices, sorted.
    pub correction: Vec<usize>,
}

/// Tanner graph of a DEM in compressed form, shared read-only by workers.
pub struct Decoder<'a> {
    pub(crate) dem: &'a DetectorErrorModel,
    pub(crate) cfg: DecoderConfig,
    pub(crate) llr: Vec<f64>,
    pub(crate) check_start: Vec<usize>,
    /// Edge ids grouped by check; edges are numbered in variable-major order.
    pub(crate) check_edges: Vec<usize>,
    pub(crate) var_start: Vec<usize>,
    pub(crate) edge_check: Vec<usize>,
    pub(crate) edge_var: Vec<usize>,
    pub(crate) rank: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(dem: &'a DetectorErrorModel, cfg: DecoderConfig) -> Self {
        let n = dem.mechanisms.len();
        let m = dem.num_detectors;
        let mut var_start = Vec::with_capacity(n + 1);
        let mut edge_check = Vec::new();
        let mut edge_var = Vec::new();
        var_start.push(0);
        for (j, mech) in dem.mechanisms.iter().enumerate() {
            edge_check.extend_from_slice(&mech.detectors);
            edge_var.resize(edge_check.len(), j);
            var_start.push(edge_check.len());
        }
        let mut counts = vec![0usize; m + 1];
        for &c in &edge_check {
            counts[c + 1] += 1;
        }
        for i in 0..m {
            counts[i + 1] += counts[i];
        }
        let check_start = counts.clone();
        let mut fill = counts;
        let mut check_edges = vec![0; edge_check.len()];
        for (e, &c) in edge_check.iter().enumerate() {
            check_edges[fill[c]] = e;
            fill[c] += 1;
        }
        let llr = dem
            .mechanisms
            .iter()
            .map(|mech| ((1.0 - mech.prior) / mech.prior).ln())
            .collect();
        let rank = crate::gf2::rank(&dem.h_dem());
        Self {
            dem,
            cfg,
            llr,
            check_start,
            check_edges,
            var_start,
            edge_check,
            edge_var,
            rank,
        }
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            v2c: vec![0.0; self.edge_check.len()],
            c2v: vec![0.0; self.edge_check.len()],
            posterior: vec![0.0; self.llr.len()],
            hard: vec![false; self.llr.len()],
            syndrome: vec![false; self.dem.num_detectors],
        }
    }

    /// Decodes one shot given the indices of its fired detectors.
    pub fn decode(&self, ws: &mut Workspace, fired: &[usize]) -> DecodeResult {
        let no = self.dem.num_observables;
        if fired.is_empty() {
            return DecodeResult {
                observables: BitVector::zeros(no),
                converged: true,
                valid: true,
                correction: Vec::new(),
            };
        }
        ws.syndrome.fill(false);
        for &d in fired {
            ws.syndrome[d] = true;
        }
        let converged = self.run_bp(ws);
        if converged || self.cfg.osd_mode == OsdMode::Off {
            let correction: Vec<usize> = (0..ws.hard.len()).filter(|&j| ws.hard[j]).collect();
            return DecodeResult {
                observables: self.predict(&correction),
                converged,
                valid: converged,
                correction,
            };
        }
        let (correction, valid) = self.run_osd(&ws.posterior, fired);
        DecodeResult {
            observables: self.predict(&correction),
            converged: false,
            valid,
            correction,
        }
    }

    pub(crate) fn predict(&self, correction: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(self.dem.num_observables);
        for &j in correction {
            for &o in &self.dem.mechanisms[j].observables {
                out.toggle(o);
            }
        }
        out
    }
}

/// Per-worker scratch buffers.
pub struct Workspace {
    pub(crate) v2c: Vec<f64>,
    pub(crate) c2v: Vec<f64>,
    pub(crate) posterior: Vec<f64>,
    pub(crate) hard: Vec<bool>,
    pub(crate) syndrome: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchDecode {
    pub shots: usize,
    pub failures: usize,
    /// Shots whose correction did not reproduce the syndrome.
    pub invalid: usize,
    /// Predicted observable flips, `words_for(num_observables)` words per shot.
    pub predictions: Vec<u64>,
}

/// Decodes every shot; a shot fails if any predicted observable differs
/// from the sampled one.
pub fn decode_batch(dem: &DetectorErrorModel, batch: &ShotBatch, cfg: &DecoderConfig) -> BatchDecode {
    decode_batch_with(dem, batch, cfg, Parallelism::default())
}

pub fn decode_batch_with(
    dem: &DetectorErrorModel,
    batch: &ShotBatch,
    cfg: &DecoderConfig,
    par: Parallelism,
) -> BatchDecode {
    assert_eq!(batch.num_detectors, dem.num_detectors, "batch/DEM detector mismatch");
    assert_eq!(batch.num_observables, dem.num_observables, "batch/DEM observable mismatch");
    let decoder = Decoder::new(dem, cfg.clone());
    decode_with(&decoder, batch, par)
}

/// Batch decoding with an already prepared decoder.
pub fn decode_with(decoder: &Decoder, batch: &ShotBatch, par: Parallelism) -> BatchDecode {
    const CHUNK: usize = 64;
    let ow = words_for(batch.num_observables);
    let chunks = batch.shots.div_ceil(CHUNK);
    let parts = map_indices(par, chunks, |c| {
        let mut ws = decoder.workspace();
        let mut failures = 0;
        let mut invalid = 0;
        let mut preds = Vec::with_capacity(CHUNK * ow);
        for s in c * CHUNK..((c + 1) * CHUNK).min(batch.shots) {
            let r = decoder.decode(&mut ws, &batch.fired(s));
            invalid += usize::from(!r.valid);
            if r.observables.words() != batch.observable_row(s) {
                failures += 1;
            }
            preds.extend_from_slice(r.observables.words());
        }
        (failures, invalid, preds)
    });
    let mut out = BatchDecode {
        shots: batch.shots,
        failures: 0,
        invalid: 0,
        predictions: Vec::with_capacity(batch.shots * ow),
    };
    for (f, i, p) in parts {
        out.failures += f;
        out.invalid += i;
        out.predictions.extend(p);
    }
    out
}
