//! Set shorthands and JSON input files.

use std::path::Path;

use littlewood::bounds::Family;
use littlewood::structures::{build_strong_lattice, gap_rank2, Shape, StructuredSet};
use littlewood::{indicator_poly, DimCertificate, IntegerSet, LatticeSet, TrigPoly};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Anything a command can consume.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Integer(IntegerSet),
    Lattice(LatticeSet),
    Poly(TrigPoly),
    Certified {
        set: StructuredSet,
        certificate: DimCertificate,
    },
    Family(Family),
}

/// Output of `gen`, also accepted as input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub set: StructuredSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<DimCertificate>,
}

impl Input {
    /// Recognizes the input by its shape. A full report written by
    /// `--output` is accepted in place of its `result`.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value = payload(serde_json::from_str(text)?);
        let has = |k: &str| value.get(k).is_some();
        Ok(if value.is_array() {
            Input::Integer(serde_json::from_value(value)?)
        } else if has("family") {
            Input::Family(serde_json::from_value(value)?)
        } else if has("set") {
            let g: Generated = serde_json::from_value(value)?;
            match (g.set, g.certificate) {
                (set, Some(certificate)) => Input::Certified { set, certificate },
                (StructuredSet::Integer(s), None) => Input::Integer(s),
                (StructuredSet::Lattice(s), None) => Input::Lattice(s),
            }
        } else if has("terms") {
            Input::Poly(serde_json::from_value(value)?)
        } else if has("points") {
            Input::Lattice(serde_json::from_value(value)?)
        } else {
            return Err(CliError::Usage(
                "input is not a set, lattice set, polynomial, generated structure or scan family"
                    .into(),
            ));
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Reads `--set` or `--input`, whichever was given.
    pub fn from_args(set: Option<&str>, input: Option<&Path>) -> Result<Self, CliError> {
        match (set, input) {
            (Some(s), None) => parse_set_spec(s),
            (None, Some(p)) => Self::load(p),
            _ => Err(CliError::Usage("exactly one of --set or --input is required".into())),
        }
    }

    /// The exponential sum (or the polynomial itself).
    pub fn poly(&self) -> Result<TrigPoly, CliError> {
        Ok(match self {
            Input::Integer(s) => indicator_poly(s)?,
            Input::Lattice(s) => indicator_poly(s)?,
            Input::Poly(p) => p.clone(),
            Input::Certified { set: StructuredSet::Integer(s), .. } => indicator_poly(s)?,
            Input::Certified { set: StructuredSet::Lattice(s), .. } => indicator_poly(s)?,
            Input::Family(_) => {
                return Err(CliError::Usage("a scan family is not a single polynomial".into()))
            }
        })
    }
}

/// The `result` of a saved report, or the value itself.
pub fn payload(value: Value) -> Value {
    match value {
        Value::Object(mut map) if map.contains_key("command") && map.contains_key("result") => {
            map.remove("result").unwrap_or_default()
        }
        other => other,
    }
}

fn bad(spec: &str, why: &str) -> CliError {
    CliError::Usage(format!("bad set `{spec}`: {why}"))
}

fn ints(spec: &str, body: &str, sep: char) -> Result<Vec<i64>, CliError> {
    body.split(sep)
        .map(|t| t.trim().parse::<i64>().map_err(|e| bad(spec, &e.to_string())))
        .collect()
}

/// Parses `interval:N` (`{1..N}`), `interval:A..B`, `list:a,b,c`,
/// `gap:a,b,M,N` and `box:n1xn2x...` (with its lattice certificate).
pub fn parse_set_spec(spec: &str) -> Result<Input, CliError> {
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| bad(spec, "expected KIND:PARAMS"))?;
    match kind {
        "interval" => {
            let (lo, hi) = match body.split_once("..") {
                Some((a, b)) => {
                    let v = ints(spec, &format!("{a},{b}"), ',')?;
                    (v[0], v[1])
                }
                None => (1, ints(spec, body, ',')?[0]),
            };
            if lo > hi {
                return Err(bad(spec, "empty interval"));
            }
            Ok(Input::Integer(IntegerSet::interval(lo, hi)))
        }
        "list" => Ok(Input::Integer(IntegerSet::new(ints(spec, body, ',')?)?)),
        "gap" => match ints(spec, body, ',')?[..] {
            [a, b, m, n] => Ok(Input::Integer(gap_rank2(a, b, m, n, false)?)),
            _ => Err(bad(spec, "expected gap:a,b,M,N")),
        },
        "box" => {
            let sizes = ints(spec, body, 'x')?
                .into_iter()
                .map(|n| usize::try_from(n).map_err(|_| bad(spec, "negative size")))
                .collect::<Result<Vec<_>, _>>()?;
            let (set, certificate) = build_strong_lattice(&sizes, Shape::Box, 0)?;
            Ok(Input::Certified {
                set: StructuredSet::Lattice(set),
                certificate,
            })
        }
        _ => Err(bad(spec, "unknown kind")),
    }
}
