//! Line-oriented `.lcx` code files.
//!
//! ```text
//! N 13
//! K 1
//! D_bound 3
//! D_exact -
//! seed vertical 3 obc 0,1
//! seed horizontal 3 obc 0,1
//! layout obc
//! begin HX
//! <matrix text>
//! end
//! begin HZ ... end
//! begin LX            one logical per line, space-separated qubits
//! begin LZ ... end
//! begin COORDS        q x y role
//! ```

use std::fmt::Write as _;

use super::css::{CssCode, ProductOrigin};
use super::layout::{LayoutMode, QubitLayout, QubitRole};
use super::seed::{build_seed_with, Boundary, SeedCode, SeedPolynomial};
use super::CodeError;
use crate::gf2::{BinaryMatrix, BitVector};

pub fn write_code(code: &CssCode) -> String {
    let mut out = String::from("# lacross code\n");
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |d| d.to_string());
    writeln!(out, "N {}", code.n).unwrap();
    writeln!(out, "K {}", code.k).unwrap();
    writeln!(out, "D_bound {}", opt(code.d_bound)).unwrap();
    writeln!(out, "D_exact {}", opt(code.d_exact)).unwrap();
    if let Some(o) = &code.origin {
        for (name, s) in [("vertical", &o.vertical), ("horizontal", &o.horizontal)] {
            let exps: Vec<String> = s.poly.exponents().iter().map(|e| e.to_string()).collect();
            writeln!(
                out,
                "seed {name} {} {} {}",
                s.n,
                s.boundary.as_str(),
                exps.join(",")
            )
            .unwrap();
        }
    }
    if let Some(l) = &code.layout {
        writeln!(out, "layout {}", l.mode.as_str()).unwrap();
    }
    for (name, m) in [("HX", &code.hx), ("HZ", &code.hz)] {
        writeln!(out, "begin {name}").unwrap();
        out.push_str(&m.to_text());
        out.push_str("end\n");
    }
    for (name, ls) in [("LX", &code.logicals_x), ("LZ", &code.logicals_z)] {
        writeln!(out, "begin {name}").unwrap();
        for l in ls {
            let q: Vec<String> = l.ones().map(|q| q.to_string()).collect();
            writeln!(out, "{}", q.join(" ")).unwrap();
        }
        out.push_str("end\n");
    }
    if let Some(l) = &code.layout {
        out.push_str("begin COORDS\n");
        for (q, (&(x, y), role)) in l.coords.iter().zip(&l.roles).enumerate() {
            let r = match role {
                QubitRole::Data => "d",
                QubitRole::AncillaX => "x",
                QubitRole::AncillaZ => "z",
            };
            writeln!(out, "{q} {x} {y} {r}").unwrap();
        }
        out.push_str("end\n");
    }
    out
}

pub fn read_code(text: &str) -> Result<CssCode, CodeError> {
    let mut n = None;
    let mut k = None;
    let mut d_bound = None;
    let mut d_exact = None;
    let mut seeds: Vec<SeedCode> = Vec::new();
    let mut mode = None;
    let mut blocks: Vec<(String, usize, Vec<String>)> = Vec::new();
    let mut open: Option<(String, usize, Vec<String>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if let Some(block) = open.as_mut() {
            if line == "end" {
                blocks.push(open.take().unwrap());
            } else {
                block.2.push(line.to_string());
            }
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| CodeError::Parse {
            line: lineno,
            message,
        };
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        let one = || -> Result<&str, CodeError> {
            rest.first()
                .copied()
                .ok_or_else(|| err(format!("`{key}` needs a value")))
        };
        let num = |s: &str| -> Result<usize, CodeError> {
            s.parse().map_err(|e| err(format!("`{s}`: {e}")))
        };
        let opt_num = |s: &str| -> Result<Option<usize>, CodeError> {
            if s == "-" {
                Ok(None)
            } else {
                num(s).map(Some)
            }
        };
        match key {
            "N" => n = Some(num(one()?)?),
            "K" => k = Some(num(one()?)?),
            "D_bound" => d_bound = opt_num(one()?)?,
            "D_exact" => d_exact = opt_num(one()?)?,
            "seed" => {
                if rest.len() != 4 {
                    return Err(err("seed needs `name n boundary exponents`".into()));
                }
                let len = num(rest[1])?;
                let boundary: Boundary = rest[2].parse()?;
                let exps = rest[3]
                    .split(',')
                    .map(num)
                    .collect::<Result<Vec<_>, _>>()?;
                seeds.push(build_seed_with(len, SeedPolynomial::new(exps)?, boundary)?);
            }
            "layout" => mode = Some(one()?.parse::<LayoutMode>()?),
            "begin" => open = Some((one()?.to_string(), lineno, Vec::new())),
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    if let Some((name, line, _)) = open {
        return Err(CodeError::Parse {
            line,
            message: format!("block {name} is not closed"),
        });
    }
    let missing = |what: &str| CodeError::Parse {
        line: 0,
        message: format!("missing {what}"),
    };
    let n = n.ok_or_else(|| missing("N"))?;
    let k = k.ok_or_else(|| missing("K"))?;
    let block = |name: &str| blocks.iter().find(|b| b.0 == name);
    let matrix = |name: &str| -> Result<BinaryMatrix, CodeError> {
        let b = block(name).ok_or_else(|| missing(name))?;
        Ok(BinaryMatrix::from_text(&b.2.join("\n"))?)
    };
    let hx = matrix("HX")?;
    let hz = matrix("HZ")?;
    let logicals = |name: &str| -> Result<Vec<BitVector>, CodeError> {
        let b = block(name).ok_or_else(|| missing(name))?;
        b.2.iter()
            .enumerate()
            .map(|(i, l)| {
                let qs = l
                    .split_whitespace()
                    .map(|s| s.parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CodeError::Parse {
                        line: b.1 + i + 1,
                        message: e.to_string(),
                    })?;
                if qs.iter().any(|&q| q >= n) {
                    return Err(CodeError::Parse {
                        line: b.1 + i + 1,
                        message: "logical support out of range".into(),
                    });
                }
                Ok(BitVector::from_positions(n, qs))
            })
            .collect()
    };
    let logicals_x = logicals("LX")?;
    let logicals_z = logicals("LZ")?;
    let origin = match seeds.len() {
        0 => None,
        2 => {
            let horizontal = seeds.pop().unwrap();
            let vertical = seeds.pop().unwrap();
            Some(ProductOrigin {
                vertical,
                horizontal,
            })
        }
        c => return Err(missing(&format!("second seed (found {c})"))),
    };
    let layout = match (mode, block("COORDS")) {
        (Some(mode), Some(b)) => Some(parse_coords(mode, b.1, &b.2, &origin, hx.rows())?),
        _ => None,
    };
    let code = CssCode {
        n,
        k,
        d_bound,
        d_exact,
        hx,
        hz,
        logicals_x,
        logicals_z,
        origin,
        layout,
    };
    if code.hx.cols() != n || code.hz.cols() != n {
        return Err(missing("check matrices with N columns"));
    }
    if !code.commutes() {
        return Err(CodeError::NotCss);
    }
    if code.logicals_x.len() != k || code.logicals_z.len() != k {
        return Err(CodeError::LogicalCount {
            expected: k,
            found: code.logicals_x.len().min(code.logicals_z.len()),
        });
    }
    Ok(code)
}

fn parse_coords(
    mode: LayoutMode,
    start: usize,
    lines: &[String],
    origin: &Option<ProductOrigin>,
    n_x: usize,
) -> Result<QubitLayout, CodeError> {
    let mut coords = Vec::with_capacity(lines.len());
    let mut roles = Vec::with_capacity(lines.len());
    for (i, l) in lines.iter().enumerate() {
        let err = |message: String| CodeError::Parse {
            line: start + i + 1,
            message,
        };
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 4 {
            return Err(err("expected `q x y role`".into()));
        }
        let q: usize = f[0].parse().map_err(|e| err(format!("{e}")))?;
        if q != i {
            return Err(err(format!("qubit {q} out of order")));
        }
        let x: i64 = f[1].parse().map_err(|e| err(format!("{e}")))?;
        let y: i64 = f[2].parse().map_err(|e| err(format!("{e}")))?;
        let role = match f[3] {
            "d" => QubitRole::Data,
            "x" => QubitRole::AncillaX,
            "z" => QubitRole::AncillaZ,
            other => return Err(err(format!("unknown role `{other}`"))),
        };
        coords.push((x, y));
        roles.push(role);
    }
    let count = |r: QubitRole| roles.iter().filter(|&&x| x == r).count();
    let n_data = count(QubitRole::Data);
    let n_x_found = count(QubitRole::AncillaX);
    let n_z = count(QubitRole::AncillaZ);
    if n_x_found != n_x {
        return Err(CodeError::Parse {
            line: start,
            message: format!("{n_x_found} X ancillas for {n_x} X checks"),
        });
    }
    let period = match (mode, origin) {
        (LayoutMode::Periodic, Some(o)) => {
            Some((2 * o.vertical.n as i64, 2 * o.horizontal.n as i64))
        }
        _ => None,
    };
    Ok(QubitLayout {
        mode,
        coords,
        roles,
        period,
        n_data,
        n_x,
        n_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_seed, hypergraph_product};

    #[test]
    fn round_trip() {
        for (n, k, b) in [(3, 1, Boundary::Open), (6, 2, Boundary::Periodic)] {
            let s = build_seed(n, k, b).unwrap();
            let mut c = hypergraph_product(&s, &s).unwrap();
            c.d_exact = Some(3);
            let text = write_code(&c);
            let back = read_code(&text).unwrap();
            assert_eq!(back.hx, c.hx);
            assert_eq!(back.hz, c.hz);
            assert_eq!(back.logicals_x, c.logicals_x);
            assert_eq!(back.logicals_z, c.logicals_z);
            assert_eq!(back.layout, c.layout);
            assert_eq!(back.origin, c.origin);
            assert_eq!((back.d_bound, back.d_exact), (c.d_bound, c.d_exact));
            assert_eq!(write_code(&back), text);
        }
    }

    #[test]
    fn rejects_unclosed_block() {
        let err = read_code("N 1\nK 0\nbegin HX\n1 1\n").unwrap_err();
        assert!(matches!(err, CodeError::Parse { .. }));
    }
}
