//! Memory-experiment sweeps: code construction, sampling until a failure or
//! shot cutoff, decoding, and curve bookkeeping with resumable manifests.

mod compare;

pub use compare::{run_comparison, surface_partition, ComparisonReport, Partition};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{write_curves_csv, AnalysisError, CurvePoint, DecodingCurve};
use crate::circuit::{build_syndrome_circuit, instrument, Circuit, CircuitError, MemoryBasis, NoiseKind, NoiseModel};
use crate::code::{
    assign_layout, build_seed, build_seed_with, hypergraph_product, Boundary, CodeError, CssCode,
    LayoutMode, SeedPolynomial,
};
use crate::decoder::{decode_with, Decoder, DecoderConfig, OsdMode};
use crate::par::Parallelism;
use crate::rydberg::{range_table, RydbergConfig, RydbergError, TableMode};
use crate::sim::{extract_dem, sample_with, SimError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("config file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{context}: {source}")]
    Code { context: String, source: CodeError },
    #[error("{context}: {source}")]
    Circuit { context: String, source: CircuitError },
    #[error("{context}: {source}")]
    Sim { context: String, source: SimError },
    #[error(transparent)]
    Rydberg(#[from] RydbergError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{context}: {invalid} shots decoded to corrections that miss the syndrome")]
    DecodeIntegrity { context: String, invalid: u64 },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub name: String,
    pub k: usize,
    /// Seed lengths `n`, one code per entry.
    pub sizes: Vec<usize>,
    pub boundary: Boundary,
    /// Defaults to the layout matching `boundary`.
    pub layout: Option<LayoutMode>,
    /// Seed exponents; defaults to `1 + x + x^k`.
    pub poly: Option<Vec<usize>>,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            name: "la-cross".into(),
            k: 3,
            sizes: vec![7],
            boundary: Boundary::Open,
            layout: None,
            poly: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    /// Physical error rates, ascending.
    pub p: Vec<f64>,
    /// Source of the range constants when `c` is not given.
    pub c_source: TableMode,
    pub c: Option<Vec<f64>>,
    pub rydberg: RydbergConfig,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            kind: NoiseKind::HardwareSpecific,
            p: vec![0.001, 0.002, 0.003],
            c_source: TableMode::Paper,
            c: None,
            rydberg: RydbergConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShotsConfig {
    pub max_shots: u64,
    pub max_errors: u64,
    pub min_batch: usize,
    pub max_batch: usize,
    /// Batch sizes adapt to expect about this many failures each.
    pub target_batch_failures: u64,
}

impl Default for ShotsConfig {
    fn default() -> Self {
        Self {
            max_shots: 100_000,
            max_errors: 1000,
            min_batch: 1024,
            max_batch: 1 << 16,
            target_batch_failures: 10,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: FamilyConfig,
    pub noise: NoiseConfig,
    /// Syndrome rounds; defaults to the code distance.
    pub rounds: Option<usize>,
    pub shots: ShotsConfig,
    pub decoder: DecoderConfig,
    /// Decoder used for the surface-code arm of comparisons.
    pub baseline_decoder: DecoderConfig,
    pub seed: u64,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: FamilyConfig::default(),
            noise: NoiseConfig::default(),
            rounds: None,
            shots: ShotsConfig::default(),
            decoder: DecoderConfig::default(),
            baseline_decoder: DecoderConfig::surface_code(),
            seed: 0,
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.family.sizes.is_empty() {
            return bad("family.sizes is empty".into());
        }
        if self.noise.p.is_empty() {
            return bad("noise.p is empty".into());
        }
        if !self.noise.p.windows(2).all(|w| w[0] < w[1]) {
            return bad("noise.p must be strictly ascending".into());
        }
        if self.noise.p.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return bad("noise.p entries must lie in (0, 1)".into());
        }
        let s = &self.shots;
        if s.max_shots == 0 || s.max_errors == 0 || s.min_batch == 0 || s.target_batch_failures == 0 {
            return bad("shot policy values must be positive".into());
        }
        if s.max_batch < s.min_batch {
            return bad("shots.max_batch below shots.min_batch".into());
        }
        if self.rounds == Some(0) {
            return bad("rounds must be at least 1".into());
        }
        self.decoder.validate().map_err(ExperimentError::Config)?;
        self.baseline_decoder.validate().map_err(ExperimentError::Config)?;
        Ok(())
    }

    /// Stable digest of everything that affects results.
    pub fn digest(&self) -> String {
        let mut bare = self.clone();
        bare.output = OutputConfig::default();
        let json = serde_json::to_string(&bare).expect("config serializes");
        format!("{:016x}", fnv1a(json.as_bytes()))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Seed for one sweep point, derived from the master seed and a point label.
pub fn point_seed(master: u64, label: &str) -> u64 {
    ChaCha8Rng::seed_from_u64(master ^ fnv1a(label.as_bytes())).next_u64()
}

/// Builds the product of the family seed with itself at length `n`.
pub fn family_code(family: &FamilyConfig, n: usize) -> Result<CssCode, ExperimentError> {
    let context = || format!("{} n={n}", family.name);
    let wrap = |source| ExperimentError::Code {
        context: context(),
        source,
    };
    let seed = match &family.poly {
        Some(exps) => build_seed_with(n, SeedPolynomial::new(exps.clone()).map_err(wrap)?, family.boundary),
        None => build_seed(n, family.k, family.boundary),
    }
    .map_err(wrap)?;
    let mut code = hypergraph_product(&seed, &seed).map_err(wrap)?;
    if let Some(mode) = family.layout {
        code.layout = Some(assign_layout(&code, mode).map_err(wrap)?);
    }
    Ok(code)
}

/// Noiseless memory circuit for `code` with the given number of rounds.
pub fn memory_circuit(code: &CssCode, rounds: usize) -> Result<Circuit, ExperimentError> {
    let layout = code.layout.as_ref().ok_or_else(|| ExperimentError::Config("code has no layout".into()))?;
    build_syndrome_circuit(code, layout, rounds, MemoryBasis::Z).map_err(|source| ExperimentError::Circuit {
        context: code.label(),
        source,
    })
}

/// Noise model at rate `p` with range constants covering `max_range`.
pub fn noise_model(noise: &NoiseConfig, p: f64, max_range: usize) -> Result<NoiseModel, ExperimentError> {
    let c = match (&noise.c, noise.kind) {
        (_, NoiseKind::HardwareAgnostic) => Vec::new(),
        (Some(c), _) => c.clone(),
        (None, _) => range_table(&noise.rydberg, max_range.max(1), noise.c_source)?.c_of_range(),
    };
    NoiseModel::new(noise.kind, p, &c).map_err(|source| ExperimentError::Circuit {
        context: format!("p={p}"),
        source,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointTally {
    pub shots: u64,
    pub failures: u64,
    pub invalid: u64,
}

/// Samples and decodes in batches until `max_errors` failures or
/// `max_shots` shots. Batches are multiples of 64 shots, so the sampled
/// shots depend only on `seed`, not on how they were batched.
pub fn run_point(
    circuit: &Circuit,
    decoder: &Decoder,
    shots: &ShotsConfig,
    seed: u64,
    par: Parallelism,
) -> Result<PointTally, SimError> {
    let round64 = |x: u64| x.div_ceil(64) * 64;
    let mut tally = PointTally::default();
    let mut batch = round64(shots.min_batch as u64);
    while tally.shots < shots.max_shots && tally.failures < shots.max_errors {
        let size = batch.min(shots.max_shots - tally.shots) as usize;
        let b = sample_with(circuit, size, seed, tally.shots / 64, par)?;
        let d = decode_with(decoder, &b, par);
        tally.shots += size as u64;
        tally.failures += d.failures as u64;
        tally.invalid += d.invalid as u64;
        let want = if tally.failures > 0 {
            shots.target_batch_failures * tally.shots / tally.failures
        } else {
            2 * batch
        };
        batch = round64(want).clamp(round64(shots.min_batch as u64), round64(shots.max_batch as u64));
    }
    Ok(tally)
}

/// Resume record keyed by the config digest.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_digest: String,
    pub points: BTreeMap<String, PointTally>,
}

impl Manifest {
    fn load(path: &Path, digest: &str) -> Result<Self, ExperimentError> {
        let fresh = Manifest {
            config_digest: digest.to_string(),
            points: BTreeMap::new(),
        };
        match std::fs::read_to_string(path) {
            Ok(text) => {
                let m: Manifest = serde_json::from_str(&text)?;
                Ok(if m.config_digest == digest { m } else { fresh })
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(fresh),
            Err(source) => Err(ExperimentError::Io {
                path: path.to_path_buf(),
                source,
            }),
        }
    }

    fn save(&self, path: &Path) -> Result<(), ExperimentError> {
        let text = serde_json::to_string_pretty(self)?;
        write_file(path, text.as_bytes())
    }
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    std::fs::write(path, bytes).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_csv(path: &Path, curves: &[DecodingCurve]) -> Result<(), ExperimentError> {
    let mut buf = Vec::new();
    write_curves_csv(&mut buf, curves)?;
    write_file(path, &buf)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub par: Parallelism,
    /// Print one line per finished point to stderr.
    pub verbose: bool,
}

/// One code of a sweep together with its noiseless circuit.
pub(crate) struct Arm {
    pub family: String,
    pub k: usize,
    pub n: usize,
    pub code: CssCode,
    pub rounds: usize,
    pub circuit: Circuit,
    pub max_range: usize,
}

impl Arm {
    pub fn new(family: &str, k: usize, n: usize, code: CssCode, rounds: usize) -> Result<Self, ExperimentError> {
        let circuit = memory_circuit(&code, rounds)?;
        let max_range = circuit.two_qubit_gates().map(|g| g.2).max().unwrap_or(1);
        Ok(Self {
            family: family.to_string(),
            k,
            n,
            code,
            rounds,
            circuit,
            max_range,
        })
    }

    fn distance(&self) -> usize {
        self.code.distance().unwrap_or(0)
    }

    /// Samples every `p` in the grid, reusing completed points from `manifest`.
    pub fn sweep(
        &self,
        cfg: &ExperimentConfig,
        decoder_cfg: &DecoderConfig,
        opts: RunOptions,
        manifest: &mut Option<(PathBuf, Manifest)>,
    ) -> Result<DecodingCurve, ExperimentError> {
        let mut curve = DecodingCurve {
            family: self.family.clone(),
            k: self.k,
            n: self.n,
            num_qubits: self.code.n,
            num_logicals: self.code.k,
            distance: self.distance(),
            noise: cfg.noise.kind.as_str().to_string(),
            rounds: self.rounds,
            points: Vec::new(),
        };
        for &p in &cfg.noise.p {
            let label = format!("{}:n={}:rounds={}:p={p}", self.family, self.n, self.rounds);
            let cached = manifest.as_ref().and_then(|(_, m)| m.points.get(&label).copied());
            let tally = match cached {
                Some(t) => t,
                None => {
                    let model = noise_model(&cfg.noise, p, self.max_range)?;
                    let noisy = instrument(&self.circuit, &model).map_err(|source| ExperimentError::Circuit {
                        context: label.clone(),
                        source,
                    })?;
                    let sim = |source| ExperimentError::Sim {
                        context: label.clone(),
                        source,
                    };
                    let dem = extract_dem(&noisy).map_err(sim)?;
                    let decoder = Decoder::new(&dem, decoder_cfg.clone());
                    let t = run_point(&noisy, &decoder, &cfg.shots, point_seed(cfg.seed, &label), opts.par)
                        .map_err(sim)?;
                    if decoder_cfg.osd_mode != OsdMode::Off && t.invalid > 0 {
                        return Err(ExperimentError::DecodeIntegrity {
                            context: label,
                            invalid: t.invalid,
                        });
                    }
                    if let Some((path, m)) = manifest.as_mut() {
                        m.points.insert(label.clone(), t);
                        m.save(path)?;
                    }
                    t
                }
            };
            let pt = CurvePoint::new(p, tally.shots, tally.failures, self.rounds);
            if opts.verbose {
                eprintln!(
                    "{} {} p={p}: {}/{} failures, P_L={:.3e}{}",
                    self.family,
                    self.code.label(),
                    tally.failures,
                    tally.shots,
                    pt.per_round,
                    if cached.is_some() { " (resumed)" } else { "" }
                );
            }
            curve.points.push(pt);
        }
        Ok(curve)
    }
}

pub(crate) fn open_manifest(cfg: &ExperimentConfig) -> Result<Option<(PathBuf, Manifest)>, ExperimentError> {
    cfg.output
        .manifest
        .as_ref()
        .map(|p| Ok((p.clone(), Manifest::load(p, &cfg.digest())?)))
        .transpose()
}

/// Runs the configured family over all sizes and error rates.
pub fn run_memory_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Vec<DecodingCurve>, ExperimentError> {
    cfg.validate()?;
    let mut manifest = open_manifest(cfg)?;
    let mut curves = Vec::new();
    for &n in &cfg.family.sizes {
        let code = family_code(&cfg.family, n)?;
        let rounds = cfg.rounds.unwrap_or_else(|| code.distance().unwrap_or(1).max(1));
        let arm = Arm::new(&cfg.family.name, cfg.family.k, n, code, rounds)?;
        curves.push(arm.sweep(cfg, &cfg.decoder, opts, &mut manifest)?);
        if let Some(path) = &cfg.output.csv {
            write_csv(path, &curves)?;
        }
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_defaults_and_validation() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            seed = 5
            [family]
            k = 2
            sizes = [5, 6]
            boundary = "obc"
            [noise]
            kind = "agnostic"
            p = [0.002, 0.004]
            [decoder]
            osd_mode = "osd0"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.family.sizes, vec![5, 6]);
        assert_eq!(cfg.noise.kind, NoiseKind::HardwareAgnostic);
        assert_eq!(cfg.decoder.osd_mode, OsdMode::Osd0);
        assert_eq!(cfg.decoder.bp_iterations, 4);
        assert_eq!(cfg.baseline_decoder.scaling_factor, 0.625);
        assert!(ExperimentConfig::from_toml("[noise]\np = [0.003, 0.001]").is_err());
        assert!(ExperimentConfig::from_toml("[family]\nbogus = 1").is_err());
    }

    #[test]
    fn digest_ignores_output_paths() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.output.csv = Some("x.csv".into());
        assert_eq!(a.digest(), b.digest());
        b.seed = 1;
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn cutoffs_are_honoured() {
        let code = family_code(
            &FamilyConfig {
                k: 1,
                sizes: vec![3],
                ..FamilyConfig::default()
            },
            3,
        )
        .unwrap();
        let circ = memory_circuit(&code, 3).unwrap();
        let noisy = instrument(&circ, &NoiseModel::hardware_agnostic(0.02).unwrap()).unwrap();
        let dem = extract_dem(&noisy).unwrap();
        let dec = Decoder::new(&dem, DecoderConfig::default());
        let shots = ShotsConfig {
            max_shots: 1_000_000,
            max_errors: 50,
            min_batch: 64,
            max_batch: 256,
            target_batch_failures: 10,
        };
        let t = run_point(&noisy, &dec, &shots, 3, Parallelism::default()).unwrap();
        assert!(t.failures >= 50 && t.failures < 50 + 256, "{t:?}");
        let capped = ShotsConfig {
            max_shots: 1000,
            max_errors: u64::MAX,
            ..shots
        };
        assert_eq!(run_point(&noisy, &dec, &capped, 3, Parallelism::default()).unwrap().shots, 1000);
    }
}
