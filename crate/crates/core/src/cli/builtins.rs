//! Ready-made scenarios. Each one is generated as JSON text and goes through
//! the same parser as a user file.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use super::scenario::{parse_rational, MAX_EXPONENT};

/// `(name, argument synopsis, description)`.
pub const BUILTINS: &[(&str, &str, &str)] = &[
    ("paper-example", "", "right shift on the direct sum of Z/2: H = <e0> and H' = <e0, e1> under beta^2"),
    ("bernoulli", "<m> <k>", "right shift on the direct sum of Z/m, logarithmic law for power k"),
    ("rational-mult", "<p>/<q> <k>", "multiplication by p/q on Q, logarithmic law for power k"),
];

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn parse_power(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(k) if (1..=MAX_EXPONENT).contains(&k) => Ok(k),
        _ => Err(format!("power must be an integer in [1, {MAX_EXPONENT}], got {s:?}")),
    }
}

/// Scenario text for a built-in, or a usage message.
pub fn builtin_text(name: &str, args: &[String]) -> Result<String, String> {
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            let synopsis = BUILTINS.iter().find(|b| b.0 == name).map_or("", |b| b.1);
            Err(format!("usage: builtin {name} {synopsis}").trim_end().to_string())
        }
    };
    match name {
        "paper-example" => {
            arity(0)?;
            Ok(paper_example())
        }
        "bernoulli" => {
            arity(2)?;
            let m = match args[0].parse::<u64>() {
                Ok(m) if m >= 2 => m,
                _ => return Err(format!("modulus must be an integer >= 2, got {:?}", args[0])),
            };
            Ok(bernoulli(m, parse_power(&args[1])?))
        }
        "rational-mult" => {
            arity(2)?;
            let q = parse_rational(&args[0])?;
            Ok(rational_mult(&q.to_string(), q.denom(), q.numer().is_zero(), parse_power(&args[1])?))
        }
        other => {
            let names: Vec<&str> = BUILTINS.iter().map(|b| b.0).collect();
            Err(format!("unknown built-in {other:?}; expected one of {}", names.join(", ")))
        }
    }
}

fn paper_example() -> String {
    let powers_of_two = |step: u32| -> Vec<String> { (0..8).map(|i| (1u64 << (step * i)).to_string()).collect() };
    pretty(&json!({
        "name": "paper-example",
        "ambient": {"kind": "torsion_sum", "modulus": 2},
        "endomorphism": {"kind": "right_shift"},
        "subgroups": {
            "H": [{"0": 1}],
            "Hp": [{"0": 1}, {"1": 1}]
        },
        "tasks": [
            {"op": "inert_certificate", "subgroup": "H", "power": 1},
            {"op": "inert_certificate", "subgroup": "H", "power": 2},
            {"op": "inert_certificate", "subgroup": "Hp", "power": 1},
            {"op": "inert_certificate", "subgroup": "Hp", "power": 2},
            {"op": "partial_trajectory", "subgroup": "H", "n": 2, "expect": "Hp"},
            {"op": "growth_trace", "subgroup": "H", "power": 2, "max_n": 8, "expect_indices": powers_of_two(1)},
            {"op": "growth_trace", "subgroup": "Hp", "power": 2, "max_n": 8, "expect_indices": powers_of_two(2)},
            {"op": "entropy", "subgroup": "H", "power": 2, "expect": "2"},
            {"op": "entropy", "subgroup": "Hp", "power": 2, "expect": "4"},
            {"op": "lemma_311a", "subgroup": "H", "k": 2},
            {"op": "log_law", "subgroup": "H", "k": 2},
            {"op": "counterexample"}
        ]
    }))
}

fn bernoulli(m: u64, k: u32) -> String {
    let mk = num_traits::pow(BigInt::from(m), k as usize);
    pretty(&json!({
        "name": format!("bernoulli-{m}-{k}"),
        "ambient": {"kind": "torsion_sum", "modulus": m},
        "endomorphism": {"kind": "right_shift"},
        "subgroups": {"F": [{"0": 1}]},
        "tasks": [
            {"op": "inert_certificate", "subgroup": "F"},
            {"op": "growth_trace", "subgroup": "F", "max_n": 8},
            {"op": "entropy_on_trajectory", "subgroup": "F", "expect": m.to_string()},
            {"op": "entropy_power_on_trajectory", "subgroup": "F", "k": k, "expect": mk.to_string()},
            {"op": "trajectory_identity", "subgroup": "F", "k": k, "m": 1, "n": 4},
            {"op": "log_law", "subgroup": "F", "k": k}
        ]
    }))
}

/// Multiplication by `q` on `Q`, starting from `F = Z`. The trajectory of
/// `Z` grows by the reduced denominator at every step.
fn rational_mult(q: &str, denom: &BigInt, zero: bool, k: u32) -> String {
    let d = if zero { BigInt::from(1) } else { denom.abs() };
    let dk = num_traits::pow(d.clone(), k as usize);
    let tag = q.replace('/', "-");
    pretty(&json!({
        "name": format!("rational-mult-{tag}-{k}"),
        "ambient": {"kind": "rational", "rank": 1},
        "endomorphism": {"kind": "matrix", "entries": [[q]]},
        "subgroups": {"F": [["1"]]},
        "tasks": [
            {"op": "inert_certificate", "subgroup": "F"},
            {"op": "growth_trace", "subgroup": "F", "max_n": 10},
            {"op": "entropy_on_trajectory", "subgroup": "F", "expect": d.to_string()},
            {"op": "entropy_power_on_trajectory", "subgroup": "F", "k": k, "expect": dk.to_string()},
            {"op": "trajectory_identity", "subgroup": "F", "k": k, "m": 1, "n": 4},
            {"op": "log_law", "subgroup": "F", "k": k}
        ]
    }))
}
