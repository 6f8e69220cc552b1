//! Flat `key = value` job and curve files.
//!
//! ```text
//! # comment
//! P = -1, 0, 0, 0, 0, 1        # ascending coefficients
//! Q = 0
//! delta_F = 5
//! f_K = 5
//! tau_poly = 889319, -137677, 6039, -61, 1
//! tau_values = 0.69…+2.12…*i, 1.80…+1.31…*i
//! character = table: 1=1, 2=i, 3=-i, 4=-1
//! precision = 256
//! degree = 1
//! tolerance = 1e-10
//! ```

use crate::cmperiod::{CMInput, TauSpec};
use crate::error::{Error, Result};
use crate::exact::{parse_rational, IntPolynomial};
use crate::igusa::WeierstrassEquation;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Job {
    pub name: Option<String>,
    pub curve: Option<WeierstrassEquation>,
    pub cm: Option<CMInput>,
    pub precision: Option<usize>,
    pub degree: usize,
    pub tolerance: f64,
}

fn line_err(n: usize, msg: impl std::fmt::Display) -> Error {
    Error::Input(format!("line {n}: {msg}"))
}

fn parse_poly(v: &str, n: usize) -> Result<IntPolynomial> {
    let coeffs = v
        .split(',')
        .map(|c| parse_rational(c.trim()).map_err(|e| line_err(n, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPolynomial::new(coeffs))
}

/// Parses a job or curve file.
pub fn parse_job(text: &str) -> Result<Job> {
    let mut name = None;
    let (mut p, mut q) = (None, None);
    let (mut delta_f, mut f_k, mut tau, mut character) = (None, None, None, None);
    let mut precision = None;
    let mut degree = 1usize;
    let mut tolerance = DEFAULT_TOLERANCE;
    let mut line_of = std::collections::HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| line_err(n, format!("expected `key = value`, found {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if line_of.insert(key.to_string(), n).is_some() {
            return Err(line_err(n, format!("duplicate key {key:?}")));
        }
        let int = |v: &str| v.parse::<i64>().map_err(|_| line_err(n, format!("{key}: expected an integer, found {v:?}")));
        match key {
            "name" => name = Some(value.to_string()),
            "P" => p = Some(parse_poly(value, n)?),
            "Q" => q = Some(parse_poly(value, n)?),
            "delta_F" => delta_f = Some(int(value)?),
            "f_K" => f_k = Some(int(value)?),
            "tau_poly" => {
                if tau.is_some() {
                    return Err(line_err(n, "give tau_poly or tau_values, not both"));
                }
                tau = Some(TauSpec::Quartic(parse_poly(value, n)?));
            }
            "tau_values" => {
                if tau.is_some() {
                    return Err(line_err(n, "give tau_poly or tau_values, not both"));
                }
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(line_err(n, "tau_values needs two comma-separated complex numbers"));
                }
                tau = Some(TauSpec::Values(parts[0].into(), parts[1].into()));
            }
            "character" => character = Some(value.to_string()),
            "precision" => {
                let b = int(value)?;
                if b < 64 {
                    return Err(line_err(n, "precision must be at least 64 bits"));
                }
                precision = Some(b as usize);
            }
            "degree" => {
                let d = int(value)?;
                if d < 1 {
                    return Err(line_err(n, "degree must be positive"));
                }
                degree = d as usize;
            }
            "tolerance" => {
                tolerance = value
                    .parse::<f64>()
                    .ok()
                    .filter(|t| *t > 0.0)
                    .ok_or_else(|| line_err(n, format!("bad tolerance {value:?}")))?;
            }
            other => return Err(line_err(n, format!("unknown key {other:?}"))),
        }
    }
    let curve = match (p, q) {
        (None, None) => None,
        (Some(p), q) => {
            let q = q.unwrap_or_else(IntPolynomial::zero);
            Some(WeierstrassEquation::new(p, q).map_err(|e| line_err(line_of["P"], e))?)
        }
        (None, Some(_)) => return Err(line_err(line_of["Q"], "Q given without P")),
    };
    let cm = match (delta_f, f_k, tau) {
        (None, None, None) => None,
        (Some(d), Some(f), Some(t)) => Some(
            CMInput::new(d, f, t, character.unwrap_or_default()).map_err(|e| line_err(line_of["delta_F"], e))?,
        ),
        _ => return Err(Error::Input("CM data needs delta_F, f_K and tau_poly or tau_values".into())),
    };
    Ok(Job { name, curve, cm, precision, degree, tolerance })
}
