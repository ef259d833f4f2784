use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lacross::analysis::{estimate_threshold, fit_subthreshold, read_curves_csv, FitExponent, SubthresholdFit, Threshold};
use lacross::circuit::{instrument, Circuit, NoiseKind, NoiseModel};
use lacross::code::{assign_layout, build_seed, build_seed_with, hypergraph_product, read_code, write_code, Boundary, LayoutMode, SeedPolynomial};
use lacross::decoder::{decode_with, Decoder, DecoderConfig, OsdMode};
use lacross::experiment::{memory_circuit, run_comparison, run_memory_experiment, ExperimentConfig, ExperimentError, RunOptions};
use lacross::par::Parallelism;
use lacross::rydberg::{range_table, RydbergConfig, RydbergError, TableMode};
use lacross::sim::{extract_dem, sample_with, DetectorErrorModel, ShotBatch};

#[derive(Parser)]
#[command(name = "lacross", version, about = "La-cross LDPC code workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a hypergraph-product code from a cyclic seed and export it.
    BuildCode(BuildCode),
    /// Build a noisy memory circuit (and optionally its error model) for a code file.
    BuildCircuit(BuildCircuit),
    /// Tabulate optimal Rydberg levels, infidelities and range constants.
    Rydberg(Rydberg),
    /// Sample detector shots from a circuit file.
    Sample(Sample),
    /// Decode sampled shots against an error model.
    Decode(Decode),
    /// Run a memory-experiment sweep from a TOML config.
    Sweep(ConfigRun),
    /// Compare the first family size against surface-code copies.
    Compare(ConfigRun),
    /// Threshold and sub-threshold fits from a curves CSV.
    Analyze(Analyze),
}

#[derive(Args)]
struct BuildCode {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Seed exponents, e.g. `0,1,3`; overrides `--k`.
    #[arg(long, value_delimiter = ',')]
    poly: Option<Vec<usize>>,
    #[arg(long, default_value = "obc")]
    boundary: Boundary,
    #[arg(long)]
    layout: Option<LayoutMode>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildCircuit {
    #[arg(long)]
    code: PathBuf,
    /// Defaults to the code distance.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, default_value = "hw")]
    noise: NoiseKind,
    #[arg(long)]
    p: f64,
    /// Range constants for hardware-specific noise.
    #[arg(long, default_value = "paper")]
    c_source: TableMode,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the detector error model here.
    #[arg(long)]
    dem: Option<PathBuf>,
}

#[derive(Args)]
struct Rydberg {
    #[arg(long, default_value_t = 7)]
    j_max: usize,
    #[arg(long, default_value = "model")]
    mode: TableMode,
    /// Angular Rabi frequency at the reference level; accepts `1.9e6x2pi`.
    #[arg(long, value_parser = parse_angular)]
    omega_ref: Option<f64>,
    /// TOML file overriding any model parameter.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Sample {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct Decode {
    #[arg(long)]
    dem: PathBuf,
    #[arg(long)]
    shots: PathBuf,
    #[arg(long, default_value_t = 4)]
    bp_iters: usize,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value = "cs")]
    osd: OsdMode,
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Limit the single-flip sweep to this many non-basis columns.
    #[arg(long)]
    cs_window: Option<usize>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct ConfigRun {
    config: PathBuf,
    #[arg(long)]
    sequential: bool,
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct Analyze {
    csv: PathBuf,
    /// Fit exponent: `effective` or a fixed number.
    #[arg(long, default_value = "effective")]
    exponent: String,
}

/// Error carrying the process exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl ToString) -> Self {
        Self { code: 2, message: message.to_string() }
    }

    fn other(message: impl ToString) -> Self {
        Self { code: 1, message: message.to_string() }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        let code = match &e {
            ExperimentError::Config(_) | ExperimentError::Toml(_) => 2,
            ExperimentError::Rydberg(r) => rydberg_code(r),
            ExperimentError::DecodeIntegrity { .. } => 4,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<RydbergError> for Failure {
    fn from(e: RydbergError) -> Self {
        Self { code: rydberg_code(&e), message: e.to_string() }
    }
}

fn rydberg_code(e: &RydbergError) -> u8 {
    match e {
        RydbergError::Infeasible(_) => 3,
        RydbergError::InvalidConfig(_) => 2,
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn parse_angular(s: &str) -> Result<f64, String> {
    let (num, factor) = match s.strip_suffix("x2pi") {
        Some(rest) => (rest, 2.0 * std::f64::consts::PI),
        None => (s, 1.0),
    };
    num.parse::<f64>().map(|v| v * factor).map_err(|e| format!("`{s}`: {e}"))
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::other(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::other(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Failure::other),
    }
}

fn json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn par(sequential: bool) -> Parallelism {
    if sequential {
        Parallelism::Sequential
    } else {
        Parallelism::default()
    }
}

fn build_code(args: BuildCode) -> CliResult {
    let seed = match args.poly {
        Some(exps) => SeedPolynomial::new(exps).and_then(|p| build_seed_with(args.n, p, args.boundary)),
        None => build_seed(args.n, args.k, args.boundary),
    }
    .map_err(Failure::config)?;
    let mut code = hypergraph_product(&seed, &seed).map_err(Failure::config)?;
    if let Some(mode) = args.layout {
        code.layout = Some(assign_layout(&code, mode).map_err(Failure::config)?);
    }
    eprintln!("{}", code.label());
    emit(args.out.as_deref(), &write_code(&code))
}

fn build_circuit(args: BuildCircuit) -> CliResult {
    let code = read_code(&read(&args.code)?).map_err(Failure::config)?;
    let rounds = args.rounds.unwrap_or_else(|| code.distance().unwrap_or(1).max(1));
    let skeleton = memory_circuit(&code, rounds)?;
    let max_range = skeleton.two_qubit_gates().map(|g| g.2).max().unwrap_or(1);
    let c = match args.noise {
        NoiseKind::HardwareAgnostic => Vec::new(),
        NoiseKind::HardwareSpecific => range_table(&RydbergConfig::default(), max_range, args.c_source)?.c_of_range(),
    };
    let model = NoiseModel::new(args.noise, args.p, &c).map_err(Failure::config)?;
    let noisy = instrument(&skeleton, &model).map_err(Failure::config)?;
    if let Some(path) = &args.dem {
        let dem = extract_dem(&noisy).map_err(Failure::other)?;
        emit(Some(path), &dem.to_text())?;
    }
    eprintln!(
        "{} rounds={rounds} detectors={} observables={}",
        code.label(),
        noisy.num_detectors(),
        noisy.num_observables()
    );
    emit(args.out.as_deref(), &noisy.to_text())
}

fn rydberg(args: Rydberg) -> CliResult {
    let mut cfg = match &args.config {
        Some(path) => toml::from_str(&read(path)?).map_err(Failure::config)?,
        None => RydbergConfig::default(),
    };
    if let Some(omega) = args.omega_ref {
        cfg.omega_ref = omega;
    }
    let table = range_table(&cfg, args.j_max, args.mode)?;
    emit(None, &json(&table.rows))
}

fn sample(args: Sample) -> CliResult {
    let circuit: Circuit = read(&args.circuit)?.parse().map_err(Failure::config)?;
    let batch = sample_with(&circuit, args.shots, args.seed, 0, par(args.sequential)).map_err(Failure::config)?;
    let file = std::fs::File::create(&args.out).map_err(|e| Failure::other(format!("{}: {e}", args.out.display())))?;
    batch.write_to(std::io::BufWriter::new(file)).map_err(Failure::other)
}

#[derive(Serialize)]
struct DecodeSummary {
    shots: usize,
    failures: usize,
    #[serde(rename = "p_L")]
    p_l: f64,
    stderr: f64,
    invalid: usize,
}

fn decode(args: Decode) -> CliResult {
    let dem: DetectorErrorModel = read(&args.dem)?.parse().map_err(Failure::config)?;
    let file = std::fs::File::open(&args.shots).map_err(|e| Failure::other(format!("{}: {e}", args.shots.display())))?;
    let batch = ShotBatch::read_from(file).map_err(Failure::config)?;
    if batch.num_detectors != dem.num_detectors || batch.num_observables != dem.num_observables {
        return Err(Failure::config(format!(
            "shots have {} detectors / {} observables, model has {} / {}",
            batch.num_detectors, batch.num_observables, dem.num_detectors, dem.num_observables
        )));
    }
    let cfg = DecoderConfig {
        bp_iterations: args.bp_iters,
        scaling_factor: args.scale,
        osd_mode: args.osd,
        osd_order: args.order,
        cs_window: args.cs_window,
    };
    cfg.validate().map_err(Failure::config)?;
    let decoder = Decoder::new(&dem, cfg);
    let result = decode_with(&decoder, &batch, par(args.sequential));
    let p_l = if result.shots > 0 { result.failures as f64 / result.shots as f64 } else { 0.0 };
    let summary = DecodeSummary {
        shots: result.shots,
        failures: result.failures,
        p_l,
        stderr: (p_l * (1.0 - p_l) / result.shots.max(1) as f64).sqrt(),
        invalid: result.invalid,
    };
    emit(None, &json(&summary))?;
    if result.invalid > 0 && args.osd != OsdMode::Off {
        return Err(Failure {
            code: 4,
            message: format!("{} shots decoded to corrections that miss the syndrome", result.invalid),
        });
    }
    Ok(())
}

fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    Ok(ExperimentConfig::from_toml(&read(path)?)?)
}

fn sweep(args: ConfigRun) -> CliResult {
    let cfg = load_config(&args.config)?;
    let opts = RunOptions { par: par(args.sequential), verbose: !args.quiet };
    let curves = run_memory_experiment(&cfg, opts)?;
    if cfg.output.csv.is_none() {
        let mut buf = Vec::new();
        lacross::analysis::write_curves_csv(&mut buf, &curves).map_err(Failure::other)?;
        std::io::stdout().write_all(&buf).map_err(Failure::other)?;
    }
    Ok(())
}

fn compare(args: ConfigRun) -> CliResult {
    let cfg = load_config(&args.config)?;
    let opts = RunOptions { par: par(args.sequential), verbose: !args.quiet };
    let report = run_comparison(&cfg, opts)?;
    if cfg.output.report.is_none() {
        emit(None, &json(&report))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FitRow {
    curve: String,
    fit: Option<SubthresholdFit>,
    error: Option<String>,
}

#[derive(Serialize)]
struct AnalysisReport {
    threshold: Option<Threshold>,
    threshold_error: Option<String>,
    fits: Vec<FitRow>,
}

fn analyze(args: Analyze) -> CliResult {
    let exponent = match args.exponent.as_str() {
        "effective" => FitExponent::Effective,
        s => FitExponent::Alpha(s.parse().map_err(|e| Failure::config(format!("--exponent `{s}`: {e}")))?),
    };
    let file = std::fs::File::open(&args.csv).map_err(|e| Failure::other(format!("{}: {e}", args.csv.display())))?;
    let curves = read_curves_csv(file).map_err(Failure::config)?;
    let threshold = estimate_threshold(&curves);
    let p_th = threshold.as_ref().ok().map(|t| t.p_th);
    let fits = curves
        .iter()
        .map(|c| {
            // Without a crossing, fit against the largest sampled rate.
            let reference = p_th.unwrap_or_else(|| c.points.iter().map(|p| p.p).fold(0.0, f64::max) * (1.0 + 1e-9));
            let fit = fit_subthreshold(c, reference, exponent);
            FitRow {
                curve: c.label(),
                error: fit.as_ref().err().map(|e| e.to_string()),
                fit: fit.ok(),
            }
        })
        .collect();
    let report = AnalysisReport {
        threshold_error: threshold.as_ref().err().map(|e| e.to_string()),
        threshold: threshold.ok(),
        fits,
    };
    emit(None, &json(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::BuildCode(a) => build_code(a),
        Command::BuildCircuit(a) => build_circuit(a),
        Command::Rydberg(a) => rydberg(a),
        Command::Sample(a) => sample(a),
        Command::Decode(a) => decode(a),
        Command::Sweep(a) => sweep(a),
        Command::Compare(a) => compare(a),
        Command::Analyze(a) => analyze(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
