use serde::{Deserialize, Serialize};

use super::CircuitError;

/// Range constants `c_1..c_7` for the hardware-specific model.
pub const DEFAULT_RANGE_CONSTANTS: [f64; 7] = [1.0, 1.6, 2.5, 3.6, 4.8, 6.1, 7.5];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// Range-dependent two-qubit errors and SPAM errors.
    #[serde(alias = "hw")]
    HardwareSpecific,
    /// Every gate fails with the same probability; no SPAM errors.
    #[serde(alias = "agnostic")]
    HardwareAgnostic,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::HardwareSpecific => "hw",
            NoiseKind::HardwareAgnostic => "agnostic",
        }
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hw" | "hardware-specific" | "specific" => Ok(NoiseKind::HardwareSpecific),
            "agnostic" | "hardware-agnostic" | "uniform" => Ok(NoiseKind::HardwareAgnostic),
            other => Err(CircuitError::InvalidNoise(format!("unknown noise kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    /// Nearest-neighbour two-qubit error probability.
    pub p: f64,
    pub p1: f64,
    /// `c_of_range[j − 1] = c_j`; unused by the agnostic model.
    pub c_of_range: Vec<f64>,
    pub p_prep: f64,
    pub p_meas: f64,
}

impl NoiseModel {
    pub fn hardware_specific(p: f64, c_of_range: &[f64]) -> Result<Self, CircuitError> {
        let m = Self {
            kind: NoiseKind::HardwareSpecific,
            p,
            p1: p / 10.0,
            c_of_range: c_of_range.to_vec(),
            p_prep: 2.0 * p,
            p_meas: 2.0 * p,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn hardware_agnostic(p: f64) -> Result<Self, CircuitError> {
        let m = Self {
            kind: NoiseKind::HardwareAgnostic,
            p,
            p1: p,
            c_of_range: Vec::new(),
            p_prep: 0.0,
            p_meas: 0.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn new(kind: NoiseKind, p: f64, c_of_range: &[f64]) -> Result<Self, CircuitError> {
        match kind {
            NoiseKind::HardwareSpecific => Self::hardware_specific(p, c_of_range),
            NoiseKind::HardwareAgnostic => Self::hardware_agnostic(p),
        }
    }

    pub fn noiseless() -> Self {
        Self {
            kind: NoiseKind::HardwareAgnostic,
            p: 0.0,
            p1: 0.0,
            c_of_range: Vec::new(),
            p_prep: 0.0,
            p_meas: 0.0,
        }
    }

    /// Two-qubit error probability for a gate spanning `j` sites.
    pub fn p2(&self, j: usize) -> Result<f64, CircuitError> {
        match self.kind {
            NoiseKind::HardwareAgnostic => Ok(self.p),
            NoiseKind::HardwareSpecific => {
                let c = j
                    .checked_sub(1)
                    .and_then(|i| self.c_of_range.get(i))
                    .ok_or(CircuitError::MissingRange(j))?;
                Ok(c * self.p)
            }
        }
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let bad = |what: &str, v: f64| {
            Err(CircuitError::InvalidNoise(format!("{what} = {v} outside [0, 1]")))
        };
        for (what, v) in [
            ("p", self.p),
            ("p1", self.p1),
            ("p_prep", self.p_prep),
            ("p_meas", self.p_meas),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(what, v);
            }
        }
        if self.kind == NoiseKind::HardwareSpecific {
            if self.c_of_range.first() != Some(&1.0) {
                return Err(CircuitError::InvalidNoise("c_1 must equal 1".into()));
            }
            if self.c_of_range.windows(2).any(|w| w[1] < w[0]) {
                return Err(CircuitError::InvalidNoise(
                    "range constants must be nondecreasing".into(),
                ));
            }
            for (i, c) in self.c_of_range.iter().enumerate() {
                let v = c * self.p;
                if !(0.0..=1.0).contains(&v) {
                    return bad(&format!("p2({})", i + 1), v);
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hardware_specific_ratios() {
        let m = NoiseModel::hardware_specific(0.002, &DEFAULT_RANGE_CONSTANTS).unwrap();
        assert_relative_eq!(m.p1, 0.0002);
        assert_relative_eq!(m.p_prep, 0.004);
        assert_relative_eq!(m.p_meas, 0.004);
        assert_relative_eq!(m.p2(1).unwrap(), 0.002);
        assert_relative_eq!(m.p2(3).unwrap(), 0.005);
        assert!(matches!(m.p2(8), Err(CircuitError::MissingRange(8))));
    }

    #[test]
    fn agnostic_is_flat() {
        let m = NoiseModel::hardware_agnostic(0.004).unwrap();
        assert_eq!((m.p1, m.p_prep, m.p_meas), (0.004, 0.0, 0.0));
        assert_eq!(m.p2(1).unwrap(), 0.004);
        assert_eq!(m.p2(40).unwrap(), 0.004);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(NoiseModel::hardware_specific(0.01, &[1.0, 0.5]).is_err());
        assert!(NoiseModel::hardware_specific(0.01, &[2.0]).is_err());
        assert!(NoiseModel::hardware_specific(0.2, &DEFAULT_RANGE_CONSTANTS).is_err());
        assert!(NoiseModel::hardware_agnostic(-0.1).is_err());
    }
}
