//! Parsers for command-line values and the JSON files they point to.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use blb_core::counterex::CounterexampleReport;
use blb_core::oscillate::{geometric_j_list, validate_j_list};
use blb_core::pointwise::PsiVariant;
use blb_core::{ProfileFn, ScalarMap, StepFunction};
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::cli::PList;
use crate::CliError;

/// Box sides `lo:hi`, one per axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BoxSpec(pub Vec<[f64; 2]>);

pub fn parse_box(s: &str) -> Result<BoxSpec, String> {
    let sides = s
        .split(',')
        .map(|side| {
            let (lo, hi) = side.split_once(':').ok_or_else(|| format!("box side '{side}' must look like lo:hi"))?;
            let lo = parse_f64(lo)?;
            let hi = parse_f64(hi)?;
            if !(lo < hi) {
                return Err(format!("box side '{side}' needs lo < hi"));
            }
            Ok([lo, hi])
        })
        .collect::<Result<Vec<_>, String>>()?;
    if sides.len() > 2 {
        return Err("boxes have at most two sides".into());
    }
    Ok(BoxSpec(sides))
}

pub fn parse_p_list(s: &str) -> Result<PList, String> {
    let ps = s.split(',').map(parse_f64).collect::<Result<Vec<_>, _>>()?;
    if ps.is_empty() {
        return Err("p list is empty".into());
    }
    Ok(PList(ps))
}

pub fn parse_variant(s: &str) -> Result<PsiVariant, String> {
    match s {
        "as_printed" => Ok(PsiVariant::AsPrinted),
        "sign_corrected" => Ok(PsiVariant::SignCorrected),
        _ => Err(format!("unknown variant '{s}' (expected as_printed or sign_corrected)")),
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

/// Catalog map from `name[:args]` or a JSON object such as
/// `{"kind":"power_sign","q":1.5}`.
pub fn parse_map(s: &str) -> Result<ScalarMap, String> {
    let s = s.trim();
    let map = if s.starts_with('{') {
        serde_json::from_str(s).map_err(|e| format!("map JSON: {e}"))?
    } else {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<f64>, String> {
            if rest.is_empty() {
                return Ok(Vec::new());
            }
            rest.split([',', ':']).map(parse_f64).collect()
        };
        let one = |field: &str| -> Result<f64, String> {
            match nums()?.as_slice() {
                [x] => Ok(*x),
                _ => Err(format!("map '{name}' takes one number, as in {name}:{field}")),
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "identity" | "t" => ScalarMap::Identity,
            "const" | "constant" => ScalarMap::Constant { c: one("c")? },
            "power_sign" => ScalarMap::PowerSign { q: one("q")? },
            "abs_power" => ScalarMap::AbsPower { p: one("p")? },
            "fp" | "f_p" => ScalarMap::FP { p: one("p")? },
            "gp" | "g_p" => ScalarMap::GP { p: one("p")? },
            "phi_p" | "phip" => ScalarMap::PhiP { p: one("p")? },
            "poly" | "polynomial" => ScalarMap::Polynomial { coeffs: nums()? },
            "pair_defect" => match nums()?.as_slice() {
                [base, p] => ScalarMap::PairDefect { base: *base, p: *p },
                _ => return Err("pair_defect takes base:p".into()),
            },
            _ => {
                return Err(format!(
                    "unknown map '{name}' (expected identity, const:c, power_sign:q, abs_power:p, fp:p, gp:p, phi_p:p, poly:c0,c1,.., pair_defect:base:p)"
                ))
            }
        }
    };
    map.validate().map_err(|e| e.to_string())?;
    Ok(map)
}

/// Set of `j` values.
#[derive(Clone, Debug, PartialEq)]
pub enum JSpec {
    Geometric(u64, u64),
    Range(u64, u64),
    List(Vec<u64>),
}

impl JSpec {
    pub fn expand(&self) -> Result<Vec<u64>, CliError> {
        let list = match self {
            JSpec::Geometric(lo, hi) => geometric_j_list(*lo, *hi)?,
            JSpec::Range(lo, hi) => (*lo..=*hi).collect(),
            JSpec::List(js) => js.clone(),
        };
        validate_j_list(&list)?;
        Ok(list)
    }
}

impl FromStr for JSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let int = |x: &str| x.trim().parse::<u64>().map_err(|_| format!("'{x}' is not a nonnegative integer"));
        let pair = |rest: &str| -> Result<(u64, u64), String> {
            let (lo, hi) = rest.split_once(':').ok_or_else(|| format!("'{s}' must look like kind:lo:hi"))?;
            let (lo, hi) = (int(lo)?, int(hi)?);
            if lo == 0 || lo > hi {
                return Err(format!("'{s}' needs 1 <= lo <= hi"));
            }
            Ok((lo, hi))
        };
        if let Some(rest) = s.strip_prefix("geometric:") {
            let (lo, hi) = pair(rest)?;
            Ok(JSpec::Geometric(lo, hi))
        } else if let Some(rest) = s.strip_prefix("range:") {
            let (lo, hi) = pair(rest)?;
            Ok(JSpec::Range(lo, hi))
        } else {
            Ok(JSpec::List(s.split(',').map(int).collect::<Result<_, _>>()?))
        }
    }
}

impl fmt::Display for JSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JSpec::Geometric(lo, hi) => write!(f, "geometric:{lo}:{hi}"),
            JSpec::Range(lo, hi) => write!(f, "range:{lo}:{hi}"),
            JSpec::List(js) => {
                let parts: Vec<String> = js.iter().map(u64::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

/// Profile `v`: a constant, a profile file, or the profile of a report.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileSource {
    Const(f64),
    File(PathBuf),
    Witness(PathBuf),
}

impl FromStr for ProfileSource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(c) = s.strip_prefix("const:") {
            Ok(ProfileSource::Const(parse_f64(c)?))
        } else if let Some(path) = s.strip_prefix("file:") {
            Ok(ProfileSource::File(path.into()))
        } else if let Some(path) = s.strip_prefix("witness:") {
            Ok(ProfileSource::Witness(path.into()))
        } else {
            Err(format!("'{s}' must be const:<c>, file:<json> or witness:<report json>"))
        }
    }
}

impl fmt::Display for ProfileSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSource::Const(c) => write!(f, "const:{c}"),
            ProfileSource::File(p) => write!(f, "file:{}", p.display()),
            ProfileSource::Witness(p) => write!(f, "witness:{}", p.display()),
        }
    }
}

impl ProfileSource {
    pub fn load(&self) -> Result<ProfileFn, CliError> {
        match self {
            ProfileSource::Const(c) => Ok(StepFunction::constant(*c).into()),
            ProfileSource::File(path) => find_profile(&read_json(path)?, path),
            ProfileSource::Witness(path) => Ok(load_report(path)?.profile),
        }
    }
}

/// Step function `u` or `ψ`: a constant or a file.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSource {
    Const(f64),
    File(PathBuf),
}

impl FromStr for WeightSource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(c) = s.strip_prefix("const:") {
            Ok(WeightSource::Const(parse_f64(c)?))
        } else if let Some(path) = s.strip_prefix("file:") {
            Ok(WeightSource::File(path.into()))
        } else {
            Err(format!("'{s}' must be const:<c> or file:<json>"))
        }
    }
}

impl fmt::Display for WeightSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSource::Const(c) => write!(f, "const:{c}"),
            WeightSource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl WeightSource {
    pub fn load(&self) -> Result<StepFunction, CliError> {
        match self {
            WeightSource::Const(c) => Ok(StepFunction::constant(*c)),
            WeightSource::File(path) => match find_profile(&read_json(path)?, path)? {
                ProfileFn::Step(f) => Ok(f),
                ProfileFn::Sampled(_) => Err(CliError::usage(format!("{}: expected a step function, found a sampled profile", path.display()))),
            },
        }
    }
}

macro_rules! display_serialize {
    ($($t:ty),*) => {$(
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    )*};
}
display_serialize!(JSpec, ProfileSource, WeightSource);

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: malformed JSON: {e}", path.display())))
}

/// A bare profile, or the `profile` of a report, possibly wrapped in a
/// `{config, result}` envelope.
fn find_profile(value: &Value, path: &Path) -> Result<ProfileFn, CliError> {
    if let Some(inner) = value.get("result").or_else(|| value.get("profile")) {
        return find_profile(inner, path);
    }
    serde_json::from_value(value.clone()).map_err(|e| {
        CliError::usage(format!(
            "{}: not a profile ({e}); expected {{\"breakpoints\",\"values\"}} or {{\"s\",\"v\",\"a\"}}",
            path.display()
        ))
    })
}

/// A counterexample report, bare or inside an envelope.
pub fn load_report(path: &Path) -> Result<CounterexampleReport, CliError> {
    let value = read_json(path)?;
    let body = value.get("result").unwrap_or(&value);
    if body.get("outcome").and_then(Value::as_str) == Some("no_witness") {
        return Err(CliError::usage(format!("{}: the run found no witness", path.display())));
    }
    serde_json::from_value(body.clone()).map_err(|e| CliError::usage(format!("{}: not a counterexample report: {e}", path.display())))
}
