use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use entropy_lab::cli::report::{EntropyValue, Outcome};
use entropy_lab::cli::{builtin_text, parse_scenario, render, run, Format, Report, RunConfig, Status};
use entropy_lab::entropy::{counterexample_report, ln};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_entropy-lab"));
    c.env_remove("ENTROPY_LAB_MAX_N");
    c
}

fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn with_stdin(cmd: &mut Command, input: &str) -> Output {
    let mut child = cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn args(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn run_text(text: &str) -> Report {
    run(&parse_scenario(text).unwrap(), &RunConfig::default())
}

#[test]
fn committed_scenarios_match_builtins() {
    let cases = [
        ("paper-example.json", builtin_text("paper-example", &[]).unwrap()),
        ("bernoulli-2-2.json", builtin_text("bernoulli", &args(&["2", "2"])).unwrap()),
        ("rational-mult-3-2-2.json", builtin_text("rational-mult", &args(&["3/2", "2"])).unwrap()),
    ];
    for (file, text) in cases {
        let on_disk = std::fs::read_to_string(scenarios_dir().join(file)).unwrap();
        assert_eq!(on_disk, text, "{file} is stale");
    }
}

#[test]
fn committed_scenarios_run_clean() {
    for file in ["paper-example.json", "bernoulli-2-2.json", "rational-mult-3-2-2.json"] {
        let out = bin().arg("run").arg(scenarios_dir().join(file)).arg("--verify-oracle").output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{file}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn paper_example_json_has_sixteen_at_n3() {
    let out = bin().args(["builtin", "paper-example", "--format", "json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"index\":\"16\""));
    let report: Report = serde_json::from_str(&text).unwrap();
    let hp_growth = report
        .tasks
        .iter()
        .find(|t| t.op == "growth_trace" && t.inputs["subgroup"] == "Hp")
        .and_then(|t| t.outcome.as_ref())
        .unwrap();
    let Outcome::Growth { rows, .. } = hp_growth else { panic!("not a growth outcome") };
    assert_eq!(rows[2].n, 3);
    assert_eq!(rows[2].index.to_string(), "16");
}

#[test]
fn paper_example_matches_counterexample_report() {
    let report = run_text(&builtin_text("paper-example", &[]).unwrap());
    assert!(report.all_ok());
    let want = counterexample_report().unwrap();
    let Some(Outcome::Counterexample { rows, refuted, .. }) =
        report.tasks.iter().find(|t| t.op == "counterexample").and_then(|t| t.outcome.clone())
    else {
        panic!("no counterexample task");
    };
    assert!(refuted);
    for (got, w) in rows.iter().zip(&want.rows) {
        assert_eq!((got.n, &got.index_h, &got.index_h_prime), (w.n, &w.index_h, &w.index_h_prime));
    }
}

#[test]
fn json_round_trips_and_decimals_agree() {
    for text in [
        builtin_text("paper-example", &[]).unwrap(),
        builtin_text("bernoulli", &args(&["5", "3"])).unwrap(),
        builtin_text("rational-mult", &args(&["7/2", "3"])).unwrap(),
    ] {
        let report = run_text(&text);
        let json = render(&report, Format::Json);
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(render(&back, Format::Table), render(&report, Format::Table));
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        check_decimals(&value);
    }
}

/// Every `{"c": .., "log": ..}` pair must agree to 1e-12.
fn check_decimals(v: &serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            if let (Some(c), Some(log)) = (map.get("c"), map.get("log")) {
                let c: num_bigint::BigUint = c.as_str().unwrap().parse().unwrap();
                let log: f64 = log.as_str().unwrap().parse().unwrap();
                assert!((ln(&c) - log).abs() <= 1e-12, "log({c}) rendered as {log}");
            }
            map.values().for_each(check_decimals);
        }
        serde_json::Value::Array(xs) => xs.iter().for_each(check_decimals),
        _ => {}
    }
}

#[test]
fn empty_task_list() {
    let text =
        r#"{"ambient": {"kind": "torsion_sum", "modulus": 3}, "endomorphism": {"kind": "identity"}, "tasks": []}"#;
    let out = with_stdin(bin().args(["run", "-", "--format", "json"]), text);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), "{\"tasks\":[]}");
}

#[test]
fn identity_has_zero_entropy() {
    let text = r#"{
        "ambient": {"kind": "rational", "rank": 2},
        "endomorphism": {"kind": "identity"},
        "subgroups": {"H": [["1", "0"], ["0", "1/3"]]},
        "tasks": [{"op": "growth_trace", "subgroup": "H", "max_n": 5}, {"op": "entropy", "subgroup": "H", "expect": "1"}]
    }"#;
    let report = run_text(text);
    assert!(report.all_ok());
    let Some(Outcome::Growth { rows, saturated_at }) = &report.tasks[0].outcome else { panic!() };
    assert!(rows.iter().all(|r| r.index.to_string() == "1"));
    assert_eq!(*saturated_at, Some(1));
}

#[test]
fn log_law_three_halves() {
    let text = r#"{
        "ambient": {"kind": "rational", "rank": 1},
        "endomorphism": {"kind": "matrix", "entries": [["3/2"]]},
        "subgroups": {"F": [["1"]]},
        "tasks": [{"op": "log_law", "subgroup": "F", "k": 2}]
    }"#;
    let report = run_text(text);
    let Some(Outcome::LogLaw { ent_phi, ent_phi_k, law_holds, .. }) = &report.tasks[0].outcome else { panic!() };
    assert!(matches!(ent_phi, EntropyValue::ExactLog { c, .. } if c == "2"));
    assert!(matches!(ent_phi_k, EntropyValue::ExactLog { c, .. } if c == "4"));
    assert_eq!(*law_holds, Some(true));
}

#[test]
fn failed_expectation_exits_one() {
    let text = r#"{
        "ambient": {"kind": "torsion_sum", "modulus": 2},
        "endomorphism": {"kind": "right_shift"},
        "subgroups": {"H": [{"0": 1}]},
        "tasks": [{"op": "entropy", "subgroup": "H", "expect": "3"}]
    }"#;
    let out = with_stdin(bin().args(["run", "-"]), text);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAILED"));
}

#[test]
fn task_errors_do_not_abort_the_batch() {
    let text = r#"{
        "ambient": {"kind": "rational", "rank": 2},
        "endomorphism": {"kind": "matrix", "entries": [["0", "1"], ["1", "0"]]},
        "subgroups": {"H": [["1", "0"]], "K": [["1", "0"], ["0", "1"]]},
        "tasks": [{"op": "entropy", "subgroup": "H"}, {"op": "quotient_index", "sup": "K", "sub": "H", "expect": "infinite"}]
    }"#;
    let report = run_text(text);
    assert_eq!(report.tasks[0].status, Status::Error);
    assert_eq!(report.tasks[1].status, Status::Ok);
    let out = with_stdin(bin().args(["run", "-"]), text);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parse_errors_exit_two_and_name_the_path() {
    let out = with_stdin(bin().args(["run", "-"]), "{ nope");
    assert_eq!(out.status.code(), Some(2));
    let bad = r#"{"ambient": {"kind": "torsion_sum", "modulus": 2},
                  "endomorphism": {"kind": "stencil", "taps": [{"offset": 0, "coeff": 1}, {"offset": 0, "coeff": 1}]}}"#;
    let out = with_stdin(bin().args(["run", "-"]), bad);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("endomorphism.taps"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bin().args(["builtin", "nope"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["builtin", "bernoulli", "2"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["frobnicate"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["run", "/nonexistent/file.json"]).output().unwrap().status.code(), Some(2));
    let out = bin().args(["builtin", "paper-example", "--max-n", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["builtin", "paper-example", "--max-n", "3", "--stability-window", "4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["builtin", "paper-example"]).env("ENTROPY_LAB_MAX_N", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn list_builtins() {
    let out = bin().arg("list-builtins").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["paper-example", "bernoulli", "rational-mult"] {
        assert!(text.contains(name));
    }
}

#[test]
fn env_cap_limits_growth_tables() {
    let out = bin()
        .args(["builtin", "bernoulli", "2", "1", "--format", "json"])
        .env("ENTROPY_LAB_MAX_N", "5")
        .output()
        .unwrap();
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    let Some(Outcome::Growth { rows, .. }) = &report.tasks[1].outcome else { panic!() };
    assert_eq!(rows.len(), 5);
}

#[test]
fn timing_is_opt_in() {
    let plain = bin().args(["builtin", "bernoulli", "3", "2", "--format", "json"]).output().unwrap();
    assert!(!String::from_utf8(plain.stdout).unwrap().contains("elapsed_ms"));
    let timed = bin().args(["builtin", "bernoulli", "3", "2", "--format", "json", "--timing"]).output().unwrap();
    assert!(String::from_utf8(timed.stdout).unwrap().contains("elapsed_ms"));
}
