//! Scenario files: parsing and validation.
//!
//! Scenarios are JSON. Rationals are always strings (`"3/2"`) so nothing
//! passes through floating point; torsion elements are sparse maps from
//! coordinate index to residue (`{"0": 1, "3": 2}`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::Value;

use crate::endo::Endo;
use crate::groups::{Ambient, Element, FgSubgroup};
use crate::linalg::{Cardinality, RatMatrix};

pub const MAX_N_LIMIT: usize = 10_000;
pub const MAX_EXPONENT: u32 = 64;
pub const MAX_M_LIMIT: usize = 256;

/// A parse or validation failure, located by JSON path.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScenarioError {
    pub path: String,
    pub message: String,
}

impl ScenarioError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ScenarioError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    name: Option<String>,
    ambient: RawAmbient,
    endomorphism: RawEndo,
    #[serde(default)]
    subgroups: BTreeMap<String, Vec<Value>>,
    #[serde(default)]
    options: RawOptions,
    #[serde(default)]
    tasks: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawAmbient {
    Rational { rank: usize },
    TorsionSum { modulus: u64 },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawEndo {
    Matrix { entries: Vec<Vec<String>> },
    RightShift,
    LeftShift,
    Identity,
    Stencil { taps: Vec<RawTap> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTap {
    offset: i64,
    coeff: i64,
}

/// Entropy knobs. Any field left out falls back to the next level:
/// task, then run flags, then the scenario's `options`, then defaults.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOptions {
    pub max_n: Option<usize>,
    pub stability_window: Option<usize>,
    pub max_m: Option<usize>,
}

impl RawOptions {
    /// `self` wins over `fallback` field by field.
    pub fn or(self, fallback: RawOptions) -> RawOptions {
        RawOptions {
            max_n: self.max_n.or(fallback.max_n),
            stability_window: self.stability_window.or(fallback.stability_window),
            max_m: self.max_m.or(fallback.max_m),
        }
    }

    fn validate(&self, path: &str) -> Result<(), ScenarioError> {
        if let Some(n) = self.max_n {
            check_range(n, 1, MAX_N_LIMIT, &format!("{path}.max_n"))?;
        }
        if let Some(w) = self.stability_window {
            let upper = self.max_n.unwrap_or(MAX_N_LIMIT);
            check_range(w, 1, upper, &format!("{path}.stability_window"))?;
        }
        if let Some(m) = self.max_m {
            check_range(m, 1, MAX_M_LIMIT, &format!("{path}.max_m"))?;
        }
        Ok(())
    }
}

fn check_range(v: usize, lo: usize, hi: usize, path: &str) -> Result<(), ScenarioError> {
    if v < lo || v > hi {
        return Err(ScenarioError::new(path, format!("{v} is outside [{lo}, {hi}]")));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    op: String,
    subgroup: Option<String>,
    power: Option<u32>,
    k: Option<u32>,
    m: Option<usize>,
    n: Option<usize>,
    sup: Option<String>,
    sub: Option<String>,
    expect: Option<String>,
    expect_indices: Option<Vec<String>>,
    max_n: Option<usize>,
    stability_window: Option<usize>,
    max_m: Option<usize>,
}

#[derive(Clone, PartialEq, Debug)]
pub enum TaskKind {
    InertCertificate { subgroup: String, power: u32 },
    PartialTrajectory { subgroup: String, power: u32, n: usize, expect: Option<String> },
    GrowthTrace { subgroup: String, power: u32, expect_indices: Option<Vec<Cardinality>> },
    Entropy { subgroup: String, power: u32, expect: Option<BigUint> },
    FindInertLevel { subgroup: String, power: u32 },
    EntropyOnTrajectory { subgroup: String, expect: Option<BigUint> },
    EntropyPowerOnTrajectory { subgroup: String, k: u32, expect: Option<BigUint> },
    TrajectoryIdentity { subgroup: String, k: u32, m: usize, n: usize },
    Lemma311a { subgroup: String, power: u32, k: usize },
    LogLaw { subgroup: String, k: u32 },
    Counterexample,
    QuotientIndex { sup: String, sub: String, expect: Option<Cardinality> },
}

impl TaskKind {
    pub fn op(&self) -> &'static str {
        match self {
            TaskKind::InertCertificate { .. } => "inert_certificate",
            TaskKind::PartialTrajectory { .. } => "partial_trajectory",
            TaskKind::GrowthTrace { .. } => "growth_trace",
            TaskKind::Entropy { .. } => "entropy",
            TaskKind::FindInertLevel { .. } => "find_inert_level",
            TaskKind::EntropyOnTrajectory { .. } => "entropy_on_trajectory",
            TaskKind::EntropyPowerOnTrajectory { .. } => "entropy_power_on_trajectory",
            TaskKind::TrajectoryIdentity { .. } => "trajectory_identity",
            TaskKind::Lemma311a { .. } => "lemma_311a",
            TaskKind::LogLaw { .. } => "log_law",
            TaskKind::Counterexample => "counterexample",
            TaskKind::QuotientIndex { .. } => "quotient_index",
        }
    }
}

pub const OPS: &[&str] = &[
    "inert_certificate",
    "partial_trajectory",
    "growth_trace",
    "entropy",
    "find_inert_level",
    "entropy_on_trajectory",
    "entropy_power_on_trajectory",
    "trajectory_identity",
    "lemma_311a",
    "log_law",
    "counterexample",
    "quotient_index",
];

#[derive(Clone, PartialEq, Debug)]
pub struct Task {
    /// The task object as written, echoed into the report.
    pub inputs: Value,
    pub kind: TaskKind,
    pub options: RawOptions,
}

#[derive(Clone, PartialEq, Debug)]
pub struct Scenario {
    pub name: Option<String>,
    pub ambient: Ambient,
    pub endo: Endo,
    pub subgroups: BTreeMap<String, FgSubgroup>,
    pub options: RawOptions,
    pub tasks: Vec<Task>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawScenario = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| ScenarioError::new(e.path().to_string(), e.inner().to_string()))?;
    de.end().map_err(|e| ScenarioError::new("", e.to_string()))?;

    let ambient = match raw.ambient {
        RawAmbient::Rational { rank } => Ambient::rational(rank),
        RawAmbient::TorsionSum { modulus } => Ambient::torsion_sum(modulus),
    }
    .map_err(|e| ScenarioError::new("ambient", e.to_string()))?;

    let endo = build_endo(raw.endomorphism, ambient)?;
    raw.options.validate("options")?;

    let mut subgroups = BTreeMap::new();
    for (name, gens) in &raw.subgroups {
        let path = format!("subgroups.{name}");
        let elems = gens
            .iter()
            .enumerate()
            .map(|(i, v)| parse_element(v, ambient).map_err(|m| ScenarioError::new(format!("{path}[{i}]"), m)))
            .collect::<Result<Vec<_>, _>>()?;
        let h = FgSubgroup::generated(ambient, &elems).map_err(|e| ScenarioError::new(&path, e.to_string()))?;
        subgroups.insert(name.clone(), h);
    }

    let tasks =
        raw.tasks.into_iter().enumerate().map(|(i, v)| parse_task(i, v, &subgroups)).collect::<Result<Vec<_>, _>>()?;

    Ok(Scenario { name: raw.name, ambient, endo, subgroups, options: raw.options, tasks })
}

fn build_endo(raw: RawEndo, ambient: Ambient) -> Result<Endo, ScenarioError> {
    let path = "endomorphism";
    let need_torsion = |kind: &str| {
        ambient.modulus().ok_or_else(|| ScenarioError::new(path, format!("{kind} needs a torsion_sum ambient")))
    };
    let endo = match raw {
        RawEndo::Identity => return Ok(Endo::identity(ambient)),
        RawEndo::RightShift => Endo::right_shift(need_torsion("right_shift")?),
        RawEndo::LeftShift => Endo::left_shift(need_torsion("left_shift")?),
        RawEndo::Stencil { taps } => {
            let modulus = need_torsion("stencil")?;
            return Endo::stencil(modulus, taps.iter().map(|t| (t.offset, t.coeff)))
                .map_err(|e| ScenarioError::new("endomorphism.taps", e.to_string()));
        }
        RawEndo::Matrix { entries } => {
            let Ambient::Rational { rank } = ambient else {
                return Err(ScenarioError::new(path, "matrix needs a rational ambient"));
            };
            if entries.len() != rank || entries.iter().any(|r| r.len() != rank) {
                return Err(ScenarioError::new("endomorphism.entries", format!("expected a {rank}x{rank} matrix")));
            }
            let mut rows = Vec::with_capacity(rank);
            for (i, row) in entries.iter().enumerate() {
                let parsed = row
                    .iter()
                    .enumerate()
                    .map(|(j, s)| {
                        parse_rational(s).map_err(|m| ScenarioError::new(format!("endomorphism.entries[{i}][{j}]"), m))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push(parsed);
            }
            Endo::matrix(RatMatrix::from_rows(rank, rows))
        }
    };
    endo.map_err(|e| ScenarioError::new(path, e.to_string()))
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if s.ends_with("/0") || s.contains("/-0") {
        return Err(format!("zero denominator in {s:?}"));
    }
    BigRational::from_str(s).map_err(|_| format!("not a rational number: {s:?}"))
}

pub fn parse_element(v: &Value, ambient: Ambient) -> Result<Element, String> {
    match (ambient, v) {
        (Ambient::Rational { rank }, Value::Array(xs)) => {
            if xs.len() != rank {
                return Err(format!("expected {rank} coordinates, found {}", xs.len()));
            }
            let coords = xs
                .iter()
                .map(|x| match x {
                    Value::String(s) => parse_rational(s),
                    other => Err(format!("rational coordinates are strings, found {other}")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Element::Rational(coords))
        }
        (Ambient::TorsionSum { modulus }, Value::Object(map)) => {
            let mut entries = Vec::with_capacity(map.len());
            for (k, r) in map {
                let idx: usize = k.parse().map_err(|_| format!("bad coordinate index {k:?}"))?;
                let res = r.as_i64().ok_or_else(|| format!("residue at {k:?} must be an integer"))?;
                entries.push((idx, res));
            }
            Ok(Element::torsion(modulus, entries))
        }
        (Ambient::Rational { .. }, _) => Err("rational elements are arrays of strings".into()),
        (Ambient::TorsionSum { .. }, _) => Err("torsion elements are objects {\"index\": residue}".into()),
    }
}

/// JSON form of an element, inverse to [`parse_element`].
pub fn element_to_json(x: &Element) -> Value {
    match x {
        Element::Rational(v) => Value::Array(v.iter().map(|q| Value::String(q.to_string())).collect()),
        Element::Torsion(map) => Value::Object(map.iter().map(|(i, r)| (i.to_string(), Value::from(*r))).collect()),
    }
}

fn parse_task(i: usize, v: Value, subgroups: &BTreeMap<String, FgSubgroup>) -> Result<Task, ScenarioError> {
    let path = format!("tasks[{i}]");
    let raw: RawTask = serde_path_to_error::deserialize(v.clone())
        .map_err(|e| ScenarioError::new(format!("{path}.{}", e.path()), e.inner().to_string()))?;
    let options = RawOptions { max_n: raw.max_n, stability_window: raw.stability_window, max_m: raw.max_m };
    options.validate(&path)?;

    let at = |field: &str| format!("{path}.{field}");
    let name = |field: &str, value: &Option<String>| -> Result<String, ScenarioError> {
        let v = value.clone().ok_or_else(|| ScenarioError::new(at(field), format!("required for op {}", raw.op)))?;
        if !subgroups.contains_key(&v) {
            return Err(ScenarioError::new(at(field), format!("undeclared subgroup {v:?}")));
        }
        Ok(v)
    };
    let exponent = |field: &str, value: Option<u32>, required: bool| -> Result<u32, ScenarioError> {
        match value {
            None if required => Err(ScenarioError::new(at(field), format!("required for op {}", raw.op))),
            None => Ok(1),
            Some(k) if (1..=MAX_EXPONENT).contains(&k) => Ok(k),
            Some(k) => Err(ScenarioError::new(at(field), format!("{k} is outside [1, {MAX_EXPONENT}]"))),
        }
    };
    let count = |field: &str, value: Option<usize>, hi: usize| -> Result<usize, ScenarioError> {
        let v = value.ok_or_else(|| ScenarioError::new(at(field), format!("required for op {}", raw.op)))?;
        check_range(v, 1, hi, &at(field))?;
        Ok(v)
    };
    let natural = |value: &Option<String>| -> Result<Option<BigUint>, ScenarioError> {
        value
            .as_ref()
            .map(|s| match s.parse::<BigUint>() {
                Ok(c) if c >= BigUint::from(1u32) => Ok(c),
                _ => Err(ScenarioError::new(at("expect"), format!("expected a positive integer, got {s:?}"))),
            })
            .transpose()
    };

    let kind = match raw.op.as_str() {
        "inert_certificate" => TaskKind::InertCertificate {
            subgroup: name("subgroup", &raw.subgroup)?,
            power: exponent("power", raw.power, false)?,
        },
        "partial_trajectory" => TaskKind::PartialTrajectory {
            subgroup: name("subgroup", &raw.subgroup)?,
            power: exponent("power", raw.power, false)?,
            n: count("n", raw.n, MAX_N_LIMIT)?,
            expect: match &raw.expect {
                Some(_) => Some(name("expect", &raw.expect)?),
                None => None,
            },
        },
        "growth_trace" => TaskKind::GrowthTrace {
            subgroup: name("subgroup", &raw.subgroup)?,
            power: exponent("power", raw.power, false)?,
            expect_indices: raw
                .expect_indices
                .as_ref()
                .map(|xs| {
                    xs.iter()
                        .enumerate()
                        .map(|(j, s)| {
                            Cardinality::try_from(s.clone())
                                .map_err(|m| ScenarioError::new(format!("{path}.expect_indices[{j}]"), m))
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?,
        },
        "entropy" => TaskKind::Entropy {
            subgroup: name("subgroup", &raw.subgroup)?,
            power: exponent("power", raw.power, false)?,
            expect: natural(&raw.expect)?,
        },
        "find_inert_level" => TaskKind::FindInertLevel {
            subgroup: name("subgroup", &raw.subgroup)?,
            power: exponent("power", raw.power, false)?,
        },
        "entropy_on_trajectory" => {
            TaskKind::EntropyOnTrajectory { subgroup: name("subgroup", &raw.subgroup)?, expect: natural(&raw.expect)? }
        }
        "entropy_power_on_trajectory" => TaskKind::EntropyPowerOnTrajectory {
            subgroup: name("subgroup", &raw.subgroup)?,
            k: exponent("k", raw.k, true)?,
            expect: natural(&raw.expect)?,
        },
        "trajectory_identity" => TaskKind::TrajectoryIdentity {
            subgroup: name("subgroup", &raw.subgroup)?,
            k: exponent("k", raw.k, true)?,
            m: count("m", raw.m, MAX_M_LIMIT)?,
            n: count("n", raw.n, MAX_N_LIMIT)?,
        },
        "lemma_311a" => TaskKind::Lemma311a {
            subgroup: name("subgroup", &raw.subgroup)?,
            power: exponent("power", raw.power, false)?,
            k: exponent("k", raw.k, true)? as usize,
        },
        "log_law" => TaskKind::LogLaw { subgroup: name("subgroup", &raw.subgroup)?, k: exponent("k", raw.k, true)? },
        "counterexample" => TaskKind::Counterexample,
        "quotient_index" => TaskKind::QuotientIndex {
            sup: name("sup", &raw.sup)?,
            sub: name("sub", &raw.sub)?,
            expect: raw
                .expect
                .as_ref()
                .map(|s| Cardinality::try_from(s.clone()).map_err(|m| ScenarioError::new(at("expect"), m)))
                .transpose()?,
        },
        other => {
            return Err(ScenarioError::new(
                at("op"),
                format!("unknown op {other:?}; expected one of {}", OPS.join(", ")),
            ))
        }
    };
    Ok(Task { inputs: v, kind, options })
}
