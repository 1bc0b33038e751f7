//! Report records and their two renderings.
//!
//! Exact quantities (indices, entropy arguments `c`) are decimal strings.
//! Every decimal logarithm is derived from the exact value next to it and
//! never stands alone.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::entropy::{ln, EntropyResult};
use crate::linalg::Cardinality;

#[derive(Clone, PartialEq, Debug, Default, Serialize, Deserialize)]
pub struct Report {
    pub tasks: Vec<TaskRecord>,
}

impl Report {
    /// True when every task ran and every assertion in it held.
    pub fn all_ok(&self) -> bool {
        self.tasks.iter().all(|t| t.status == Status::Ok)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// Ran, but an asserted equality did not hold.
    Failed,
    /// Could not run.
    Error,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: usize,
    pub op: String,
    pub inputs: Value,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntropyValue {
    ExactLog { c: String, log: String },
    Undetermined { lower: String, upper: String, observed_n: usize },
}

impl From<&EntropyResult> for EntropyValue {
    fn from(e: &EntropyResult) -> Self {
        match e {
            EntropyResult::ExactLog(c) => EntropyValue::ExactLog { c: c.to_string(), log: decimal(ln(c)) },
            EntropyResult::Undetermined { trace, lower, upper } => {
                EntropyValue::Undetermined { lower: decimal(*lower), upper: decimal(*upper), observed_n: trace.len() }
            }
        }
    }
}

/// Twelve fractional digits; `inf` for an unbounded side.
pub fn decimal(x: f64) -> String {
    if x.is_infinite() {
        return "inf".into();
    }
    format!("{x:.12}")
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleCheck {
    Match,
    Mismatch { oracle: Cardinality },
    Skipped { reason: String },
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    /// `|T_n / H|`.
    pub index: Cardinality,
    /// `|T_{n+1} / T_n|`, absent on the last row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub increment: Option<Cardinality>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub subgroup: String,
    pub power: u32,
    pub defect: Cardinality,
    pub inert: bool,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CounterexampleRecordRow {
    pub n: usize,
    pub index_h: Cardinality,
    pub index_h_prime: Cardinality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_h: Option<OracleCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_h_prime: Option<OracleCheck>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    InertCertificate {
        defect: Cardinality,
        inert: bool,
    },
    Subgroup {
        generators: Vec<Value>,
        order: Cardinality,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        equals_expected: Option<bool>,
    },
    Growth {
        rows: Vec<GrowthRow>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        saturated_at: Option<usize>,
    },
    Entropy {
        entropy: EntropyValue,
    },
    InertLevel {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<Value>>,
    },
    TrajectoryIdentity {
        holds: bool,
    },
    Lemma311a {
        left: EntropyValue,
        right: EntropyValue,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        equal: Option<bool>,
    },
    LogLaw {
        k: u32,
        ent_phi: EntropyValue,
        ent_phi_k: EntropyValue,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_times_ent_phi: Option<EntropyValue>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        law_holds: Option<bool>,
    },
    Counterexample {
        h: Vec<Value>,
        h_prime: Vec<Value>,
        certificates: Vec<CertificateRecord>,
        rows: Vec<CounterexampleRecordRow>,
        entropy_h: EntropyValue,
        entropy_h_prime: EntropyValue,
        refuted: bool,
    },
    QuotientIndex {
        index: Cardinality,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        oracle: Option<OracleCheck>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Table,
    Json,
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(report).expect("report serializes"),
        Format::Table => render_table(report),
    }
}

fn entropy_text(e: &EntropyValue) -> String {
    match e {
        EntropyValue::ExactLog { c, log } => format!("log({c}) = {log}"),
        EntropyValue::Undetermined { lower, upper, observed_n } => {
            format!("undetermined after n = {observed_n}, tail bounds [{lower}, {upper}]")
        }
    }
}

fn opt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "undecided",
    }
}

fn oracle_text(o: &Option<OracleCheck>) -> String {
    match o {
        None => String::new(),
        Some(OracleCheck::Match) => "match".into(),
        Some(OracleCheck::Mismatch { oracle }) => format!("MISMATCH (oracle {oracle})"),
        Some(OracleCheck::Skipped { reason }) => format!("skipped: {reason}"),
    }
}

fn list(gens: &[Value]) -> String {
    let parts: Vec<String> = gens.iter().map(Value::to_string).collect();
    format!("<{}>", parts.join(", "))
}

/// The first row is the header. Numeric columns are right-aligned, the
/// rest left-aligned.
fn table(out: &mut String, rows: &[Vec<String>]) {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let numeric: Vec<bool> = (0..cols)
        .map(|c| {
            rows.iter()
                .skip(1)
                .filter_map(|r| r.get(c))
                .all(|s| s.chars().all(|ch| ch.is_ascii_digit()) || s == "infinite")
        })
        .collect();
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .enumerate()
            .map(
                |(c, s)| if numeric[c] { format!("{s:>w$}", w = widths[c]) } else { format!("{s:<w$}", w = widths[c]) },
            )
            .collect();
        let _ = writeln!(out, "    {}", cells.join("  ").trim_end());
    }
}

fn render_table(report: &Report) -> String {
    let mut out = String::new();
    for t in &report.tasks {
        let status = match t.status {
            Status::Ok => "ok",
            Status::Failed => "FAILED",
            Status::Error => "ERROR",
        };
        let args = match &t.inputs {
            Value::Object(map) => map
                .iter()
                .filter(|(k, _)| k.as_str() != "op")
                .map(|(k, v)| match v {
                    Value::String(s) => format!("{k}={s}"),
                    other => format!("{k}={other}"),
                })
                .collect::<Vec<_>>()
                .join(" "),
            _ => String::new(),
        };
        let timing = t.elapsed_ms.map(|ms| format!(" ({ms:.1} ms)")).unwrap_or_default();
        let _ = writeln!(out, "[{}] {} {} .. {}{}", t.task, t.op, args, status, timing);
        for note in &t.notes {
            let _ = writeln!(out, "    note: {note}");
        }
        let Some(outcome) = &t.outcome else { continue };
        match outcome {
            Outcome::InertCertificate { defect, inert } => {
                let _ =
                    writeln!(out, "    defect |(H + f(H))/H| = {defect}, inert: {}", if *inert { "yes" } else { "no" });
            }
            Outcome::Subgroup { generators, order, equals_expected } => {
                let _ = writeln!(out, "    {} of order {order}", list(generators));
                if let Some(eq) = equals_expected {
                    let _ = writeln!(out, "    equals expected: {}", opt_bool(Some(*eq)));
                }
            }
            Outcome::Growth { rows, saturated_at } => {
                let mut grid = vec![vec!["n".to_string(), "|T_n/H|".into(), "|T_n+1/T_n|".into()]];
                let with_oracle = rows.iter().any(|r| r.oracle.is_some());
                if with_oracle {
                    grid[0].push("oracle".into());
                }
                for r in rows {
                    let mut line = vec![
                        r.n.to_string(),
                        r.index.to_string(),
                        r.increment.as_ref().map(ToString::to_string).unwrap_or_default(),
                    ];
                    if with_oracle {
                        line.push(oracle_text(&r.oracle));
                    }
                    grid.push(line);
                }
                table(&mut out, &grid);
                if let Some(n) = saturated_at {
                    let _ = writeln!(out, "    saturated at n = {n}");
                }
            }
            Outcome::Entropy { entropy } => {
                let _ = writeln!(out, "    entropy: {}", entropy_text(entropy));
            }
            Outcome::InertLevel { level, generators } => match (level, generators) {
                (Some(m), Some(g)) => {
                    let _ = writeln!(out, "    first inert level m = {m}, T_m = {}", list(g));
                }
                _ => {
                    let _ = writeln!(out, "    no inert level within max_m");
                }
            },
            Outcome::TrajectoryIdentity { holds } => {
                let _ = writeln!(out, "    T_n(f^k, H) = T_(kn-k+1)(f, H): {}", opt_bool(Some(*holds)));
            }
            Outcome::Lemma311a { left, right, equal } => {
                let _ = writeln!(out, "    ent(f, H)      = {}", entropy_text(left));
                let _ = writeln!(out, "    ent(f, T_k(H)) = {}", entropy_text(right));
                let _ = writeln!(out, "    equal: {}", opt_bool(*equal));
            }
            Outcome::LogLaw { k, ent_phi, ent_phi_k, k_times_ent_phi, law_holds } => {
                let _ = writeln!(out, "    ent(f)       = {}", entropy_text(ent_phi));
                let _ = writeln!(out, "    ent(f^{k})     = {}", entropy_text(ent_phi_k));
                if let Some(kt) = k_times_ent_phi {
                    let _ = writeln!(out, "    {k} * ent(f)   = {}", entropy_text(kt));
                }
                let _ = writeln!(out, "    law holds: {}", opt_bool(*law_holds));
            }
            Outcome::Counterexample { h, h_prime, certificates, rows, entropy_h, entropy_h_prime, refuted } => {
                let _ = writeln!(out, "    H = {}, H' = {}", list(h), list(h_prime));
                for c in certificates {
                    let _ = writeln!(
                        out,
                        "    {} under beta^{}: defect {}, inert {}",
                        c.subgroup,
                        c.power,
                        c.defect,
                        if c.inert { "yes" } else { "no" }
                    );
                }
                let with_oracle = rows.iter().any(|r| r.oracle_h.is_some());
                let mut grid = vec![vec!["n".to_string(), "|T_n(b^2,H)/H|".into(), "|T_n(b^2,H')/H'|".into()]];
                if with_oracle {
                    grid[0].push("oracle H".into());
                    grid[0].push("oracle H'".into());
                }
                for r in rows {
                    let mut line = vec![r.n.to_string(), r.index_h.to_string(), r.index_h_prime.to_string()];
                    if with_oracle {
                        line.push(oracle_text(&r.oracle_h));
                        line.push(oracle_text(&r.oracle_h_prime));
                    }
                    grid.push(line);
                }
                table(&mut out, &grid);
                let _ = writeln!(out, "    ent(beta^2, H)  = {}", entropy_text(entropy_h));
                let _ = writeln!(out, "    ent(beta^2, H') = {}", entropy_text(entropy_h_prime));
                let _ = writeln!(out, "    entropies differ: {}", opt_bool(Some(*refuted)));
            }
            Outcome::QuotientIndex { index, oracle } => {
                let _ = writeln!(out, "    index = {index}");
                if oracle.is_some() {
                    let _ = writeln!(out, "    oracle: {}", oracle_text(oracle));
                }
            }
        }
    }
    out
}
