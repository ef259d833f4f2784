//! Rydberg-atom CZ gate model: infidelity versus interatomic distance,
//! optimal principal quantum numbers, range constants and gate durations.

mod schedule;

pub use schedule::{parallel_schedule, verify_schedule, Schedule, ScheduleReport};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::DEFAULT_RANGE_CONSTANTS;

const BOLTZMANN: f64 = 1.380_649e-23;
const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of ¹³⁷Cs in atomic mass units.
pub const CS137_MASS_U: f64 = 136.907_089_5;

/// Counter-propagating 459.3 nm (6s → 7p₁/₂) and 1038.7 nm (7p₁/₂ → ns) beams.
pub fn default_k_eff() -> f64 {
    2.0 * PI * (1.0 / 459.3e-9 - 1.0 / 1038.7e-9)
}

#[derive(Debug, Error, PartialEq)]
pub enum RydbergError {
    #[error("no principal quantum number satisfies blockade and upper bound at range {0}")]
    Infeasible(usize),
    #[error("invalid Rydberg configuration: {0}")]
    InvalidConfig(String),
}

/// SI units throughout; frequencies are angular.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RydbergConfig {
    /// Lattice spacing `R` in metres.
    pub spacing: f64,
    pub temperature: f64,
    /// Atomic mass in atomic mass units.
    pub mass_u: f64,
    pub k_eff: f64,
    pub n_ref: f64,
    /// Rabi frequency at `n_ref`.
    pub omega_ref: f64,
    /// Rydberg decay rate at `n_ref`.
    pub gamma_ref: f64,
    /// Van der Waals shift at `n_ref` and distance `spacing`.
    pub b_ref: f64,
    /// Required `B / Ω`.
    pub blockade_factor: f64,
    /// Upper bound on `n` per range `j` (index `j - 1`); missing entries
    /// fall back to `n_search_max`.
    pub n_max: Vec<u32>,
    pub n_search_max: u32,
    /// Nearest-neighbour gate duration in seconds.
    pub tau_ref: f64,
    /// Additional Rydberg dephasing rate added in quadrature to the Doppler term.
    pub extra_dephasing: f64,
}

impl Default for RydbergConfig {
    fn default() -> Self {
        let spacing = 3e-6;
        // C6 ≈ 2π × 150 GHz µm⁶ for the 75s pair state.
        let c6 = 2.0 * PI * 150e9 * 1e-36;
        Self {
            spacing,
            temperature: 10e-6,
            mass_u: CS137_MASS_U,
            k_eff: default_k_eff(),
            n_ref: 75.0,
            omega_ref: 2.0 * PI * 1.9e6,
            gamma_ref: 1.0 / 430e-6,
            b_ref: c6 / spacing.powi(6),
            blockade_factor: 3.0,
            n_max: Vec::new(),
            n_search_max: 300,
            tau_ref: 250e-9,
            extra_dephasing: 0.0,
        }
    }
}

impl RydbergConfig {
    pub fn validate(&self) -> Result<(), RydbergError> {
        let positive = [
            ("spacing", self.spacing),
            ("mass", self.mass_u),
            ("k_eff", self.k_eff),
            ("n_ref", self.n_ref),
            ("omega_ref", self.omega_ref),
            ("b_ref", self.b_ref),
            ("tau_ref", self.tau_ref),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(RydbergError::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.temperature < 0.0 || self.gamma_ref < 0.0 || self.extra_dephasing < 0.0 {
            return Err(RydbergError::InvalidConfig("negative rate or temperature".into()));
        }
        if self.blockade_factor < 1.0 {
            return Err(RydbergError::InvalidConfig("blockade factor below 1".into()));
        }
        Ok(())
    }
}

/// Thermal Doppler dephasing `k_eff √(k_B T / m)`.
pub fn doppler_dephasing(cfg: &RydbergConfig) -> f64 {
    cfg.k_eff * (BOLTZMANN * cfg.temperature / (cfg.mass_u * ATOMIC_MASS_UNIT)).sqrt()
}

/// Time-optimal CZ infidelity from decay `gamma` and dephasing `delta` at Rabi
/// frequency `omega`.
pub fn cz_infidelity(gamma: f64, omega: f64, delta: f64) -> f64 {
    2.96 * gamma / omega + 7.12 * delta * delta / (omega * omega)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledParams {
    pub omega: f64,
    pub gamma: f64,
    pub blockade: f64,
}

/// Rabi frequency, decay rate and blockade shift at principal number `n`
/// for two atoms `distance` metres apart.
pub fn scaled_params(n: f64, distance: f64, cfg: &RydbergConfig) -> ScaledParams {
    let x = cfg.n_ref / n;
    ScaledParams {
        omega: cfg.omega_ref * x.powf(1.5),
        gamma: cfg.gamma_ref * x.powi(3),
        blockade: cfg.b_ref * (n / cfg.n_ref).powi(11) * (cfg.spacing / distance).powi(6),
    }
}

fn dephasing(cfg: &RydbergConfig) -> f64 {
    doppler_dephasing(cfg).hypot(cfg.extra_dephasing)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalN {
    pub n: u32,
    pub infidelity: f64,
    /// The minimum sits at the smallest blockade-feasible `n`.
    pub at_blockade_boundary: bool,
}

/// Integer `n` minimizing the CZ infidelity at range `j` subject to
/// `B ≥ factor·Ω` and `n ≤ n_max(j)`.
pub fn optimal_n(j: usize, cfg: &RydbergConfig) -> Result<OptimalN, RydbergError> {
    assert!(j >= 1);
    let distance = j as f64 * cfg.spacing;
    let upper = cfg.n_max.get(j - 1).copied().unwrap_or(cfg.n_search_max);
    let delta = dephasing(cfg);
    let mut best: Option<OptimalN> = None;
    let mut lowest_feasible = None;
    for n in 1..=upper {
        let s = scaled_params(n as f64, distance, cfg);
        if s.blockade < cfg.blockade_factor * s.omega {
            continue;
        }
        lowest_feasible.get_or_insert(n);
        let f = cz_infidelity(s.gamma, s.omega, delta);
        if best.is_none_or(|b| f < b.infidelity) {
            best = Some(OptimalN {
                n,
                infidelity: f,
                at_blockade_boundary: false,
            });
        }
    }
    let mut best = best.ok_or(RydbergError::Infeasible(j))?;
    best.at_blockade_boundary = Some(best.n) == lowest_feasible;
    Ok(best)
}

/// Real `n` at which the blockade constraint is exactly tight at range `j`.
pub fn optimal_n_continuous(j: usize, cfg: &RydbergConfig) -> f64 {
    // factor·Ω_ref (n_ref/n)^{3/2} = B_ref (n/n_ref)^{11} j^{-6}
    let ratio = cfg.blockade_factor * cfg.omega_ref / cfg.b_ref * (j as f64).powi(6);
    cfg.n_ref * ratio.powf(2.0 / 25.0)
}

/// Gate duration at range `j`, growing as `j^{18/25}`.
pub fn gate_duration(j: usize, cfg: &RydbergConfig) -> f64 {
    cfg.tau_ref * (j as f64).powf(18.0 / 25.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMode {
    /// Fixed published constants.
    #[default]
    Paper,
    /// Computed from the scaling-law model.
    Model,
}

impl std::str::FromStr for TableMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(TableMode::Paper),
            "model" => Ok(TableMode::Model),
            other => Err(format!("unknown table mode `{other}` (paper|model)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeRow {
    pub j: usize,
    pub n_j: Option<u32>,
    pub infidelity: Option<f64>,
    pub c_j: f64,
    /// Seconds.
    pub tau_j: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeErrorTable {
    pub mode: TableMode,
    pub rows: Vec<RangeRow>,
}

impl RangeErrorTable {
    pub fn c_of_range(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.c_j).collect()
    }
}

/// Range constants `c_j = (1 − F_j)/(1 − F_1)` and durations for `j = 1..=j_max`.
pub fn range_table(cfg: &RydbergConfig, j_max: usize, mode: TableMode) -> Result<RangeErrorTable, RydbergError> {
    cfg.validate()?;
    if j_max == 0 {
        return Err(RydbergError::InvalidConfig("j_max must be at least 1".into()));
    }
    let rows = match mode {
        TableMode::Paper => {
            if j_max > DEFAULT_RANGE_CONSTANTS.len() {
                return Err(RydbergError::InvalidConfig(format!(
                    "published constants stop at range {}",
                    DEFAULT_RANGE_CONSTANTS.len()
                )));
            }
            (1..=j_max)
                .map(|j| RangeRow {
                    j,
                    n_j: None,
                    infidelity: None,
                    c_j: DEFAULT_RANGE_CONSTANTS[j - 1],
                    tau_j: gate_duration(j, cfg),
                })
                .collect()
        }
        TableMode::Model => {
            let opts = (1..=j_max)
                .map(|j| optimal_n(j, cfg))
                .collect::<Result<Vec<_>, _>>()?;
            let f1 = opts[0].infidelity;
            opts.iter()
                .enumerate()
                .map(|(i, o)| RangeRow {
                    j: i + 1,
                    n_j: Some(o.n),
                    infidelity: Some(o.infidelity),
                    c_j: o.infidelity / f1,
                    tau_j: gate_duration(i + 1, cfg),
                })
                .collect()
        }
    };
    Ok(RangeErrorTable { mode, rows })
}
