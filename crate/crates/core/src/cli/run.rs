//! Executes scenario tasks and assembles the report.

use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;

use super::report::{
    CertificateRecord, CounterexampleRecordRow, EntropyValue, GrowthRow, OracleCheck, Outcome, Report, Status,
    TaskRecord,
};
use super::scenario::{element_to_json, RawOptions, Scenario, Task, TaskKind};
use crate::endo::{power, EndoPower};
use crate::entropy::{self, EntropyOptions, EntropyResult};
use crate::error::Result;
use crate::groups::{quotient_index, Ambient, Element, FgSubgroup};
use crate::linalg::Cardinality;
use crate::oracle::{self, CyclicRational, DEFAULT_CAP};

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    /// Command-line values; they override the scenario's `options` but not
    /// per-task settings.
    pub overrides: RawOptions,
    /// Hard ceiling on `max_n`, applied after every other source.
    pub max_n_cap: Option<usize>,
    pub verify_oracle: bool,
    pub timing: bool,
}

pub fn run(scenario: &Scenario, cfg: &RunConfig) -> Report {
    let tasks = scenario.tasks.par_iter().enumerate().map(|(i, t)| run_task(scenario, i, t, cfg)).collect();
    Report { tasks }
}

fn resolve(scenario: &Scenario, task: &Task, cfg: &RunConfig, notes: &mut Vec<String>) -> EntropyOptions {
    let o = task.options.or(cfg.overrides).or(scenario.options);
    let d = EntropyOptions::default();
    let mut max_n = o.max_n.unwrap_or(d.max_n);
    if let Some(cap) = cfg.max_n_cap {
        if max_n > cap {
            notes.push(format!("max_n lowered from {max_n} to {cap} by ENTROPY_LAB_MAX_N"));
            max_n = cap;
        }
    }
    let mut stability_window = o.stability_window.unwrap_or(d.stability_window);
    if stability_window > max_n {
        notes.push(format!("stability_window lowered from {stability_window} to {max_n}"));
        stability_window = max_n;
    }
    EntropyOptions { max_n, stability_window, max_m: o.max_m.unwrap_or(d.max_m) }
}

fn run_task(scenario: &Scenario, i: usize, task: &Task, cfg: &RunConfig) -> TaskRecord {
    let start = Instant::now();
    let mut notes = Vec::new();
    let opts = resolve(scenario, task, cfg, &mut notes);
    let (status, outcome) = match execute(scenario, &task.kind, &opts, cfg.verify_oracle, &mut notes) {
        Ok((outcome, passed)) => (if passed { Status::Ok } else { Status::Failed }, Some(outcome)),
        Err(e) => {
            notes.push(e.to_string());
            (Status::Error, None)
        }
    };
    TaskRecord {
        task: i,
        op: task.kind.op().to_string(),
        inputs: task.inputs.clone(),
        status,
        outcome,
        notes,
        elapsed_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    }
}

fn gens_json(h: &FgSubgroup) -> Vec<serde_json::Value> {
    h.generators().iter().map(element_to_json).collect()
}

fn expect_exact(result: &EntropyResult, expect: &Option<BigUint>, notes: &mut Vec<String>) -> bool {
    let Some(want) = expect else { return true };
    match result.exact() {
        Some(c) if c == want => true,
        Some(c) => {
            notes.push(format!("expected log({want}), got log({c})"));
            false
        }
        None => {
            notes.push(format!("expected log({want}), entropy did not stabilize"));
            false
        }
    }
}

/// Returns the outcome and whether every assertion in the task held.
fn execute(
    scenario: &Scenario,
    kind: &TaskKind,
    opts: &EntropyOptions,
    verify: bool,
    notes: &mut Vec<String>,
) -> Result<(Outcome, bool)> {
    let sub = |name: &str| &scenario.subgroups[name];
    let endo = &scenario.endo;
    Ok(match kind {
        TaskKind::InertCertificate { subgroup, power: k } => {
            let cert = entropy::inert_certificate(&power(endo, *k)?, sub(subgroup))?;
            (Outcome::InertCertificate { defect: cert.defect, inert: cert.verdict }, true)
        }
        TaskKind::PartialTrajectory { subgroup, power: k, n, expect } => {
            let t = entropy::partial_trajectory(&power(endo, *k)?, sub(subgroup), *n)?;
            let equals_expected = expect.as_ref().map(|e| &t == sub(e));
            if equals_expected == Some(false) {
                notes.push(format!("T_{n} differs from {}", expect.as_deref().unwrap_or_default()));
            }
            let outcome = Outcome::Subgroup { generators: gens_json(&t), order: t.order(), equals_expected };
            (outcome, equals_expected != Some(false))
        }
        TaskKind::GrowthTrace { subgroup, power: k, expect_indices } => {
            let f = power(endo, *k)?;
            let h = sub(subgroup);
            let trace = entropy::growth_trace(&f, h, opts.max_n)?;
            let oracle = if verify { Some(oracle_indices(&f, h, trace.len())) } else { None };
            let mut ok = true;
            let rows = (0..trace.len())
                .map(|j| {
                    let check = oracle.as_ref().map(|o| compare(&trace.indices[j], &o[j]));
                    if matches!(check, Some(OracleCheck::Mismatch { .. })) {
                        ok = false;
                        notes.push(format!("oracle disagrees at n = {}", j + 1));
                    }
                    GrowthRow {
                        n: j + 1,
                        index: trace.indices[j].clone(),
                        increment: (j + 1 < trace.len()).then(|| trace.increments[j].clone()),
                        oracle: check,
                    }
                })
                .collect();
            if let Some(want) = expect_indices {
                if want.len() > trace.len() {
                    notes.push(format!("{} expected indices but only {} computed", want.len(), trace.len()));
                    ok = false;
                }
                for (j, (w, got)) in want.iter().zip(&trace.indices).enumerate() {
                    if w != got {
                        notes.push(format!("n = {}: expected {w}, got {got}", j + 1));
                        ok = false;
                    }
                }
            }
            (Outcome::Growth { rows, saturated_at: trace.saturated_at }, ok)
        }
        TaskKind::Entropy { subgroup, power: k, expect } => {
            let e = entropy::entropy_wrt(&power(endo, *k)?, sub(subgroup), opts)?;
            let ok = expect_exact(&e, expect, notes);
            (Outcome::Entropy { entropy: EntropyValue::from(&e) }, ok)
        }
        TaskKind::FindInertLevel { subgroup, power: k } => {
            let found = entropy::find_inert_trajectory_level(&power(endo, *k)?, sub(subgroup), opts.max_m)?;
            let outcome = match found {
                Some((m, t)) => Outcome::InertLevel { level: Some(m), generators: Some(gens_json(&t)) },
                None => Outcome::InertLevel { level: None, generators: None },
            };
            (outcome, true)
        }
        TaskKind::EntropyOnTrajectory { subgroup, expect } => {
            let e = entropy::entropy_on_trajectory(endo, sub(subgroup), opts)?;
            let ok = expect_exact(&e, expect, notes);
            (Outcome::Entropy { entropy: EntropyValue::from(&e) }, ok)
        }
        TaskKind::EntropyPowerOnTrajectory { subgroup, k, expect } => {
            let e = entropy::entropy_power_on_trajectory(endo, *k, sub(subgroup), opts)?;
            let ok = expect_exact(&e, expect, notes);
            (Outcome::Entropy { entropy: EntropyValue::from(&e) }, ok)
        }
        TaskKind::TrajectoryIdentity { subgroup, k, m, n } => {
            let holds = entropy::trajectory_identity_check(endo, *k, *m, sub(subgroup), *n)?;
            (Outcome::TrajectoryIdentity { holds }, holds)
        }
        TaskKind::Lemma311a { subgroup, power: p, k } => {
            let r = entropy::lemma_311a_check(&power(endo, *p)?, sub(subgroup), *k, opts)?;
            let outcome = Outcome::Lemma311a { left: (&r.left).into(), right: (&r.right).into(), equal: r.equal };
            (outcome, r.equal != Some(false))
        }
        TaskKind::LogLaw { subgroup, k } => {
            let r = entropy::log_law_report(endo, *k, sub(subgroup), opts)?;
            let outcome = Outcome::LogLaw {
                k: r.k,
                ent_phi: (&r.ent_phi).into(),
                ent_phi_k: (&r.ent_phi_k).into(),
                k_times_ent_phi: r.k_times_ent_phi.as_ref().map(Into::into),
                law_holds: r.law_holds,
            };
            (outcome, r.law_holds != Some(false))
        }
        TaskKind::Counterexample => counterexample(verify, notes)?,
        TaskKind::QuotientIndex { sup, sub: s, expect } => {
            let index = quotient_index(sub(sup), sub(s))?;
            let oracle = verify.then(|| match scenario.ambient {
                Ambient::TorsionSum { .. } => compare(
                    &index,
                    &oracle::index_by_enumeration(sub(sup), sub(s), DEFAULT_CAP).map_err(|e| e.to_string()),
                ),
                Ambient::Rational { .. } => {
                    OracleCheck::Skipped { reason: "enumeration needs a torsion ambient".into() }
                }
            });
            let mut ok = !matches!(oracle, Some(OracleCheck::Mismatch { .. }));
            if !ok {
                notes.push("oracle disagrees".into());
            }
            ok &= match expect {
                Some(want) if *want != index => {
                    notes.push(format!("expected {want}, got {index}"));
                    false
                }
                _ => true,
            };
            (Outcome::QuotientIndex { index, oracle }, ok)
        }
    })
}

fn counterexample(verify: bool, notes: &mut Vec<String>) -> Result<(Outcome, bool)> {
    let r = entropy::counterexample_report()?;
    let (oracle_h, oracle_hp) = if verify {
        let beta2 = power(&crate::endo::Endo::right_shift(2)?, 2)?;
        (Some(oracle_indices(&beta2, &r.h, r.rows.len())), Some(oracle_indices(&beta2, &r.h_prime, r.rows.len())))
    } else {
        (None, None)
    };
    let mut ok = r.refuted;
    let rows = r
        .rows
        .iter()
        .enumerate()
        .map(|(j, row)| {
            let oh = oracle_h.as_ref().map(|o| compare(&row.index_h, &o[j]));
            let ohp = oracle_hp.as_ref().map(|o| compare(&row.index_h_prime, &o[j]));
            for c in [&oh, &ohp] {
                if matches!(c, Some(OracleCheck::Mismatch { .. })) {
                    ok = false;
                    notes.push(format!("oracle disagrees at n = {}", row.n));
                }
            }
            CounterexampleRecordRow {
                n: row.n,
                index_h: row.index_h.clone(),
                index_h_prime: row.index_h_prime.clone(),
                oracle_h: oh,
                oracle_h_prime: ohp,
            }
        })
        .collect();
    let certificates = r
        .certificates
        .iter()
        .map(|(name, k, c)| CertificateRecord {
            subgroup: (*name).to_string(),
            power: *k,
            defect: c.defect.clone(),
            inert: c.verdict,
        })
        .collect();
    let outcome = Outcome::Counterexample {
        h: gens_json(&r.h),
        h_prime: gens_json(&r.h_prime),
        certificates,
        rows,
        entropy_h: (&r.entropy_h).into(),
        entropy_h_prime: (&r.entropy_h_prime).into(),
        refuted: r.refuted,
    };
    Ok((outcome, ok))
}

fn compare(computed: &Cardinality, oracle: &std::result::Result<Cardinality, String>) -> OracleCheck {
    match oracle {
        Ok(c) if c == computed => OracleCheck::Match,
        Ok(c) => OracleCheck::Mismatch { oracle: c.clone() },
        Err(reason) => OracleCheck::Skipped { reason: reason.clone() },
    }
}

/// `|T_n(f, H) / H|` for `n = 1..=rows` by independent means, or the reason
/// none is available.
pub fn oracle_indices(f: &EndoPower, h: &FgSubgroup, rows: usize) -> Vec<std::result::Result<Cardinality, String>> {
    let skip_all = |reason: String| vec![Err(reason); rows];
    match h.ambient() {
        Ambient::TorsionSum { .. } => torsion_oracle(f, h, rows).unwrap_or_else(|e| skip_all(e.to_string())),
        Ambient::Rational { rank: 1 } => match f.as_scalar() {
            Some(a) => {
                let q = num_traits::pow(a.clone(), f.exponent() as usize);
                let coords: Vec<_> = h
                    .generators()
                    .into_iter()
                    .filter_map(|g| match g {
                        Element::Rational(v) => v.into_iter().next(),
                        Element::Torsion(_) => None,
                    })
                    .collect();
                let base = CyclicRational::from_generators(&coords);
                let mut layer = base.generator().clone();
                let mut t = base.clone();
                (1..=rows)
                    .map(|n| {
                        if n > 1 {
                            layer = &layer * &q;
                            t = oracle::cyclic_sum(&t, &CyclicRational::new(layer.clone()));
                        }
                        t.index_over(&base).map_err(|e| e.to_string())
                    })
                    .collect()
            }
            None => skip_all("no scalar form".into()),
        },
        Ambient::Rational { .. } => skip_all("no oracle for rank >= 2".into()),
    }
}

fn torsion_oracle(f: &EndoPower, h: &FgSubgroup, rows: usize) -> Result<Vec<std::result::Result<Cardinality, String>>> {
    let ambient = h.ambient();
    let mut layer = h.generators();
    let hs = oracle::enumerate_generated(ambient, &layer, DEFAULT_CAP)?;
    let capped = || Err(format!("more than {DEFAULT_CAP} elements"));
    if hs.capped {
        return Ok(vec![capped(); rows]);
    }
    let mut gens = layer.clone();
    let mut out = Vec::with_capacity(rows);
    for n in 1..=rows {
        if n > 1 {
            layer = layer
                .iter()
                .map(|x| f.apply(x))
                .filter(|x| !matches!(x, Ok(y) if y.is_zero()))
                .collect::<Result<_>>()?;
            gens.extend(layer.iter().cloned());
        }
        let ts = oracle::enumerate_generated(ambient, &gens, DEFAULT_CAP)?;
        if ts.capped {
            out.resize(rows, capped());
            break;
        }
        out.push(Ok(Cardinality::finite(BigUint::from(ts.len() / hs.len()))));
    }
    Ok(out)
}
