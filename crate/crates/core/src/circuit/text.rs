use std::fmt::Write as _;
use std::str::FromStr;

use super::{Circuit, CircuitError, Op};

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

impl Circuit {
    /// One instruction per line, preceded by a `QUBITS` / `ROUNDS` header.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "QUBITS {}", self.num_qubits).unwrap();
        writeln!(out, "ROUNDS {}", self.rounds).unwrap();
        for op in &self.ops {
            let line = match op {
                Op::R(q) => format!("R {}", join(q)),
                Op::RX(q) => format!("RX {}", join(q)),
                Op::M(q) => format!("M {}", join(q)),
                Op::MX(q) => format!("MX {}", join(q)),
                Op::MR(q) => format!("MR {}", join(q)),
                Op::H(q) => format!("H {}", join(q)),
                Op::CX(g) => format!("CX {}", join(g.iter().flat_map(|&(c, t, j)| [c, t, j]))),
                Op::Dep1(p, q) => format!("DEP1 {p} {}", join(q)),
                Op::Dep2(p, g) => format!("DEP2 {p} {}", join(g.iter().flat_map(|&(a, b)| [a, b]))),
                Op::XErr(p, q) => format!("XERR {p} {}", join(q)),
                Op::ZErr(p, q) => format!("ZERR {p} {}", join(q)),
                Op::Detector(m) => format!("DETECTOR {}", join(m)),
                Op::Observable(i, m) => format!("OBSERVABLE {i} {}", join(m)),
                Op::Tick => "TICK".to_string(),
            };
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

impl FromStr for Circuit {
    type Err = CircuitError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut num_qubits = None;
        let mut rounds = 1;
        let mut ops = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| CircuitError::Parse {
                line: idx + 1,
                message,
            };
            let mut parts = line.split_whitespace();
            let name = parts.next().unwrap();
            let args: Vec<&str> = parts.collect();
            let ints = |xs: &[&str]| -> Result<Vec<usize>, CircuitError> {
                xs.iter()
                    .map(|s| s.parse().map_err(|e| err(format!("`{s}`: {e}"))))
                    .collect()
            };
            let prob = || -> Result<f64, CircuitError> {
                let s = args.first().ok_or_else(|| err("missing probability".into()))?;
                let p: f64 = s.parse().map_err(|e| err(format!("`{s}`: {e}")))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(err(format!("probability {p} outside [0, 1]")));
                }
                Ok(p)
            };
            let pairs = |xs: Vec<usize>| -> Result<Vec<(usize, usize)>, CircuitError> {
                if xs.len() % 2 != 0 {
                    return Err(err("odd number of pair targets".into()));
                }
                Ok(xs.chunks(2).map(|c| (c[0], c[1])).collect())
            };
            let op = match name {
                "QUBITS" => {
                    num_qubits = Some(ints(&args)?.first().copied().unwrap_or(0));
                    continue;
                }
                "ROUNDS" => {
                    rounds = ints(&args)?.first().copied().unwrap_or(1);
                    continue;
                }
                "R" => Op::R(ints(&args)?),
                "RX" => Op::RX(ints(&args)?),
                "M" => Op::M(ints(&args)?),
                "MX" => Op::MX(ints(&args)?),
                "MR" => Op::MR(ints(&args)?),
                "H" => Op::H(ints(&args)?),
                "CX" => {
                    let v = ints(&args)?;
                    if v.len() % 3 != 0 {
                        return Err(err("CX takes control target range triples".into()));
                    }
                    Op::CX(v.chunks(3).map(|c| (c[0], c[1], c[2])).collect())
                }
                "DEP1" => Op::Dep1(prob()?, ints(&args[1..])?),
                "DEP2" => Op::Dep2(prob()?, pairs(ints(&args[1..])?)?),
                "XERR" => Op::XErr(prob()?, ints(&args[1..])?),
                "ZERR" => Op::ZErr(prob()?, ints(&args[1..])?),
                "DETECTOR" => Op::Detector(ints(&args)?),
                "OBSERVABLE" => {
                    let v = ints(&args)?;
                    let (&i, m) = v.split_first().ok_or_else(|| err("missing index".into()))?;
                    Op::Observable(i, m.to_vec())
                }
                "TICK" => Op::Tick,
                other => return Err(err(format!("unknown instruction `{other}`"))),
            };
            ops.push(op);
        }
        let max_qubit = ops
            .iter()
            .flat_map(|op| -> Vec<usize> {
                match op {
                    Op::R(q) | Op::RX(q) | Op::M(q) | Op::MX(q) | Op::MR(q) | Op::H(q) => q.clone(),
                    Op::Dep1(_, q) | Op::XErr(_, q) | Op::ZErr(_, q) => q.clone(),
                    Op::CX(g) => g.iter().flat_map(|&(c, t, _)| [c, t]).collect(),
                    Op::Dep2(_, g) => g.iter().flat_map(|&(a, b)| [a, b]).collect(),
                    _ => Vec::new(),
                }
            })
            .max();
        let needed = max_qubit.map_or(0, |q| q + 1);
        let num_qubits = num_qubits.unwrap_or(needed);
        if needed > num_qubits {
            return Err(CircuitError::Parse {
                line: 0,
                message: format!("qubit {} exceeds declared count {num_qubits}", needed - 1),
            });
        }
        let circuit = Circuit {
            num_qubits,
            rounds,
            ops,
        };
        let measurements = circuit.num_measurements();
        for op in &circuit.ops {
            if let Op::Detector(m) | Op::Observable(_, m) = op {
                if let Some(&bad) = m.iter().find(|&&i| i >= measurements) {
                    return Err(CircuitError::Parse {
                        line: 0,
                        message: format!("measurement index {bad} out of range"),
                    });
                }
            }
        }
        Ok(circuit)
    }
}
