//! State files: a YAML mapping (block or flow style, so JSON works too).
//!
//! ```text
//! {family: ghz, labels: [A1, A2, R], dims: [2, 2, 2], reference: R}
//! ```
//!
//! Family parameters:
//! - `product`: `basis`, one digit per label (`"010"`, `010` or `[0, 1, 0]`).
//! - `bell`: `pairs`, e.g. `[[A1, R]]`.
//! - `random_pure`: `seed`.
//! - `mixture`: `branches`, each `{weight: w, factors: {label: f}}` where `f` is a basis index,
//!   a list of real amplitudes or a list of `[re, im]` pairs.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;
use serde_yaml::Value;

use super::format::sig;
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::qstate::{Family, MAX_TOTAL_DIM};

const WEIGHT_TOL: f64 = 1e-9;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: Option<String>,
    labels: Option<Vec<String>>,
    dims: Option<Vec<i64>>,
    reference: Option<String>,
    basis: Option<Value>,
    pairs: Option<Vec<Vec<String>>>,
    seed: Option<u64>,
    branches: Option<Vec<RawBranch>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBranch {
    weight: f64,
    factors: BTreeMap<String, Value>,
}

/// A validated state file.
#[derive(Clone, Debug)]
pub struct StateSpec {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub reference: String,
    pub family_name: String,
    family: Family,
}

impl StateSpec {
    pub fn family(&self) -> Result<Family> {
        Ok(self.family.clone())
    }

    /// Every label except the reference, in file order.
    pub fn senders(&self) -> Vec<String> {
        self.labels.iter().filter(|l| **l != self.reference).cloned().collect()
    }
}

/// 1-based line of the first `key:` in `text`, or 1.
fn line_of(text: &str, key: &str) -> usize {
    let needle = format!("{key}:");
    text.lines()
        .position(|l| {
            l.match_indices(&needle).any(|(i, _)| {
                i == 0 || !l.as_bytes()[i - 1].is_ascii_alphanumeric() && l.as_bytes()[i - 1] != b'_'
            })
        })
        .map_or(1, |i| i + 1)
}

fn field_error(text: &str, key: &str, msg: impl Into<String>) -> Error {
    Error::Parse { line: line_of(text, key), msg: msg.into() }
}

fn basis_digits(v: &Value, m: usize) -> std::result::Result<Vec<usize>, String> {
    let from_str = |s: &str| -> std::result::Result<Vec<usize>, String> {
        let s = s.trim();
        if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad basis entry `{t}`")))
                .collect()
        } else {
            let padded = format!("{s:0>m$}");
            padded
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| format!("bad basis digit `{c}`")))
                .collect()
        }
    };
    match v {
        Value::String(s) => from_str(s),
        Value::Number(n) => match n.as_u64() {
            Some(u) => from_str(&u.to_string()),
            None => Err(format!("bad basis `{n}`")),
        },
        Value::Sequence(items) => items
            .iter()
            .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| "basis entries must be non-negative integers".into()))
            .collect(),
        _ => Err("basis must be a digit string or a list".into()),
    }
}

fn number(v: &Value) -> Option<f64> {
    v.as_f64().or_else(|| v.as_i64().map(|i| i as f64))
}

fn factor_vector(v: &Value, dim: usize) -> std::result::Result<CVector, String> {
    match v {
        Value::Number(n) => {
            let k = n.as_u64().ok_or("basis index must be a non-negative integer")? as usize;
            if k >= dim {
                return Err(format!("basis index {k} out of range for dimension {dim}"));
            }
            let mut e = CVector::zeros(dim);
            e[k] = Complex64::new(1.0, 0.0);
            Ok(e)
        }
        Value::Sequence(items) => {
            if items.len() != dim {
                return Err(format!("{} amplitudes for dimension {dim}", items.len()));
            }
            let amps = items
                .iter()
                .map(|a| match a {
                    Value::Sequence(pair) if pair.len() == 2 => match (number(&pair[0]), number(&pair[1])) {
                        (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                        _ => Err("amplitude pairs must be numbers".to_string()),
                    },
                    _ => number(a).map(|re| Complex64::new(re, 0.0)).ok_or_else(|| "bad amplitude".to_string()),
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let v = CVector::from_vec(amps);
            if v.norm() == 0.0 {
                return Err("zero factor vector".into());
            }
            Ok(v)
        }
        _ => Err("factor must be a basis index or an amplitude list".into()),
    }
}

/// Parses and validates a state file.
pub fn parse_state_spec(text: &str) -> Result<StateSpec> {
    let raw: RawSpec = serde_yaml::from_str(text).map_err(|e| Error::Parse {
        line: e.location().map_or(1, |l| l.line()),
        msg: e.to_string(),
    })?;

    let labels = raw.labels.ok_or_else(|| field_error(text, "labels", "missing `labels`"))?;
    for (i, l) in labels.iter().enumerate() {
        if l.is_empty() {
            return Err(field_error(text, "labels", "labels must be nonempty"));
        }
        if labels[..i].contains(l) {
            return Err(field_error(text, "labels", format!("duplicate label `{l}`")));
        }
    }
    let raw_dims = raw.dims.ok_or_else(|| field_error(text, "dims", "missing `dims`"))?;
    if raw_dims.len() != labels.len() {
        return Err(field_error(
            text,
            "dims",
            format!("{} dims for {} labels", raw_dims.len(), labels.len()),
        ));
    }
    if raw_dims.iter().any(|&d| d < 1) {
        return Err(field_error(text, "dims", "dimension must be ≥ 1"));
    }
    let dims: Vec<usize> = raw_dims.iter().map(|&d| d as usize).collect();
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    if total.is_none_or(|t| t > MAX_TOTAL_DIM) {
        return Err(field_error(
            text,
            "dims",
            format!("total dimension exceeds the cap of {MAX_TOTAL_DIM}"),
        ));
    }

    let reference = raw.reference.ok_or_else(|| field_error(text, "reference", "missing reference label"))?;
    if !labels.contains(&reference) {
        return Err(field_error(text, "reference", format!("reference `{reference}` is not a label")));
    }
    if labels.len() < 2 {
        return Err(field_error(text, "labels", "need at least one sender besides the reference"));
    }

    let family_name = raw.family.ok_or_else(|| field_error(text, "family", "missing `family`"))?;
    let m = labels.len();
    let family = match family_name.as_str() {
        "product" => {
            let v = raw.basis.ok_or_else(|| field_error(text, "family", "product family needs `basis`"))?;
            let basis = basis_digits(&v, m).map_err(|msg| field_error(text, "basis", msg))?;
            if basis.len() != m {
                return Err(field_error(text, "basis", format!("{} basis entries for {m} labels", basis.len())));
            }
            if let Some(i) = (0..m).find(|&i| basis[i] >= dims[i]) {
                return Err(field_error(
                    text,
                    "basis",
                    format!("basis index {} out of range for `{}`", basis[i], labels[i]),
                ));
            }
            Family::Product { basis }
        }
        "ghz" => {
            if dims.iter().any(|&d| d != dims[0]) {
                return Err(field_error(text, "dims", "ghz needs equal dimensions"));
            }
            Family::Ghz
        }
        "w" => Family::W,
        "bell" => {
            let pairs = raw.pairs.ok_or_else(|| field_error(text, "family", "bell family needs `pairs`"))?;
            let mut used: Vec<&String> = Vec::new();
            let mut out = Vec::with_capacity(pairs.len());
            for p in &pairs {
                let [a, b] = p.as_slice() else {
                    return Err(field_error(text, "pairs", "each pair must name two labels"));
                };
                for l in [a, b] {
                    if !labels.contains(l) {
                        return Err(field_error(text, "pairs", format!("unknown label `{l}`")));
                    }
                    if used.contains(&l) {
                        return Err(field_error(text, "pairs", format!("label `{l}` is in two pairs")));
                    }
                    used.push(l);
                }
                out.push((a.clone(), b.clone()));
            }
            Family::Bell { pairs: out }
        }
        "random_pure" => Family::RandomPure { seed: raw.seed.unwrap_or(0) },
        "mixture" => {
            let branches =
                raw.branches.ok_or_else(|| field_error(text, "family", "mixture family needs `branches`"))?;
            if branches.is_empty() {
                return Err(field_error(text, "branches", "mixture needs at least one branch"));
            }
            let sum: f64 = branches.iter().map(|b| b.weight).sum();
            if let Some(b) = branches.iter().find(|b| !(b.weight.is_finite() && b.weight >= 0.0)) {
                return Err(field_error(text, "weight", format!("weight {} is negative", b.weight)));
            }
            if (sum - 1.0).abs() > WEIGHT_TOL {
                return Err(field_error(text, "weight", format!("weights sum {} ≠ 1", sig(sum))));
            }
            let mut out = Vec::with_capacity(branches.len());
            for b in &branches {
                if let Some(extra) = b.factors.keys().find(|k| !labels.contains(k)) {
                    return Err(field_error(text, "factors", format!("unknown label `{extra}` in factors")));
                }
                let factors = labels
                    .iter()
                    .zip(&dims)
                    .map(|(l, &d)| {
                        let v = b
                            .factors
                            .get(l)
                            .ok_or_else(|| field_error(text, "factors", format!("branch has no factor for `{l}`")))?;
                        factor_vector(v, d).map_err(|msg| field_error(text, "factors", format!("`{l}`: {msg}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push((b.weight, factors));
            }
            Family::Mixture { branches: out }
        }
        other => return Err(field_error(text, "family", format!("unknown family `{other}`"))),
    };
    Ok(StateSpec { labels, dims, reference, family_name, family })
}
