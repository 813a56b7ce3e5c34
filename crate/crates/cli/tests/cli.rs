use std::process::Command;

use serde_json::Value;

use diagfpt_cli::Report;

fn diagfpt(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_diagfpt"))
        .args(args)
        .env_remove("DIAGFPT_BUDGET_TERMS")
        .env_remove("DIAGFPT_BUDGET_COLUMNS")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn report(args: &[&str]) -> (i32, Report) {
    let (code, text) = diagfpt(args);
    (code, serde_json::from_str(&text).expect("json report"))
}

#[test]
fn documented_examples() {
    let (code, r) = report(&["fpt", "--exponents", "2,3", "--prime", "7"]);
    assert_eq!(code, 0);
    assert_eq!(r.result.to_string(), r#"{"fpt":"5/6"}"#);

    let (code, r) = report(&["jumping", "--degree", "6", "--prime", "11"]);
    assert_eq!(code, 0);
    assert_eq!(
        r.result.to_string(),
        r#"{"fpt":"7/11","jumps":["9/11","1"],"complete":false,"regime":"SMALL_P"}"#
    );

    let (code, r) = report(&["nu", "--exponents", "2,3", "--prime", "5", "--e", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r.result.to_string(), r#"{"nu":3,"bracket":["3/5","4/5"]}"#);
}

#[test]
fn exit_codes() {
    assert_eq!(diagfpt(&["fpt", "--exponents", "2,3", "--prime", "9"]).0, 2);
    assert_eq!(diagfpt(&["fpt", "--exponents", "2,3"]).0, 2);
    assert_eq!(diagfpt(&["test-ideal", "--exponents", "2,6", "--prime", "3"]).0, 1);
    assert_eq!(diagfpt(&["test-ideal", "--exponents", "2,3", "--prime", "5"]).0, 0);
    let tiny = diagfpt(&[
        "test-ideal", "--exponents", "6,6,6,6,6,6", "--prime", "11", "--lambda", "98/121", "--budget-terms", "100",
    ]);
    assert_eq!(tiny.0, 1);
}

#[test]
fn budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_diagfpt"))
        .args(["nu", "--exponents", "2,3,5", "--prime", "13", "--e", "2"])
        .env("DIAGFPT_BUDGET_TERMS", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.request.limits.max_terms, 5);
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[test]
fn sweep_reproduces_the_four_cases() {
    let (code, r) = report(&["sweep", "--exponents", "2,3", "--primes", "2..20"]);
    assert_eq!(code, 0);
    let rows = r.result["rows"].as_array().unwrap();
    let primes: Vec<u64> = rows.iter().map(|row| row["p"].as_u64().unwrap()).collect();
    assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19]);
    for row in rows {
        let p = row["p"].as_u64().unwrap();
        let expected = match p {
            2 => "1/2".to_string(),
            3 => "2/3".to_string(),
            _ if p % 6 == 1 => "5/6".to_string(),
            _ => {
                let (n, d) = (5 * p - 1, 6 * p);
                let g = gcd(n, d);
                format!("{}/{}", n / g, d / g)
            }
        };
        assert_eq!(row["fpt"], expected.as_str(), "p = {p}");
        assert_eq!(row["residue"], p % 6);
    }
}

#[test]
fn sweep_single_variable_is_constant() {
    let (_, r) = report(&["sweep", "--exponents", "7", "--primes", "2..60"]);
    for row in r.result["rows"].as_array().unwrap() {
        assert_eq!(row["fpt"], "1/7");
    }
}

#[test]
fn fermat_sweep_regimes() {
    let (_, r) = report(&["sweep", "--degree", "6", "--primes", "7..50"]);
    for row in r.result["rows"].as_array().unwrap() {
        let p = row["p"].as_u64().unwrap();
        let a = p % 6;
        let small = a >= 2 && p < a * 5;
        let regime = row["regime"].as_str().unwrap();
        // the candidate can land exactly on p, which says nothing new
        let expected = match (small, p) {
            (true, 23) => "NO_INFO",
            (true, _) => "SMALL_P",
            (false, _) if a == 1 => "A1",
            _ => "BIG_P",
        };
        assert_eq!(regime, expected, "p = {p}");
    }
}

#[test]
fn json_round_trips_and_matches_csv() {
    let args = ["sweep", "--exponents", "2,3,4", "--primes", "2..40"];
    let (_, text) = diagfpt(&args);
    let r: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&r).unwrap() + "\n", text);

    let mut csv_args = args.to_vec();
    csv_args.extend(["--output", "csv"]);
    let (_, csv) = diagfpt(&csv_args);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let rows = r.result["rows"].as_array().unwrap();
    for (line, row) in lines.zip(rows) {
        for (key, cell) in header.iter().zip(line.split(',')) {
            let v = match &row[*key] {
                Value::String(t) => t.clone(),
                other => other.to_string(),
            };
            assert_eq!(v, cell, "{key}");
        }
    }
    assert_eq!(csv.lines().count(), rows.len() + 1);
}

#[test]
fn output_is_deterministic_and_exact() {
    fn no_floats(v: &Value) -> bool {
        match v {
            Value::Number(n) => n.is_u64() || n.is_i64(),
            Value::Array(items) => items.iter().all(no_floats),
            Value::Object(m) => m.values().all(no_floats),
            _ => true,
        }
    }
    for args in [
        &["verify", "--exponents", "2,3", "--prime", "7"][..],
        &["jump-scan", "--degree", "6", "--prime", "11", "--e-max", "2"][..],
        &["test-ideal", "--exponents", "2,3", "--prime", "5", "--lambda", "4/5"][..],
        &["fermat-fpt", "--degree", "4", "--prime", "2"][..],
    ] {
        let (code, first) = diagfpt(args);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(diagfpt(args).1, first);
        assert!(no_floats(&serde_json::from_str(&first).unwrap()));
    }
}

#[test]
fn scan_and_oracle_commands() {
    let (_, r) = report(&["jump-scan", "--degree", "6", "--prime", "11", "--e-max", "2"]);
    assert_eq!(r.result["changes"].to_string(), r#"["7/11","9/11","1"]"#);

    let (_, r) = report(&["test-ideal", "--exponents", "2,3", "--prime", "5", "--lambda", "4/5"]);
    assert_eq!(r.result["shape"], "maximal");
    assert_eq!(r.result["stabilization"], "exact");

    let (_, r) = report(&["test-ideal", "--exponents", "2,3", "--prime", "5", "--lambda", "1"]);
    assert_eq!(r.result["shape"], "principal-f");

    let (code, r) = report(&["verify", "--exponents", "3,3,3", "--prime", "7", "--e", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r.result["agree"], true);

    let (_, r) = report(&["fermat-fpt", "--degree", "4", "--prime", "2"]);
    assert_eq!(r.result.to_string(), r#"{"fpt":"1/4","case":{"ell":2}}"#);
}

#[test]
fn test_ideal_generators_are_minimal_with_term_pairs() {
    let (code, r) = report(&["test-ideal", "--exponents", "2,6", "--prime", "3", "--lambda", "2/3"]);
    assert_eq!(code, 0);
    assert_eq!(r.result["shape"], "other");
    assert_eq!(r.result["generators"].to_string(), r#"["x2^2","x1"]"#);
    assert_eq!(r.result["generator_terms"].to_string(), "[[[[0,2],1]],[[[1,0],1]]]");

    let (_, csv) = diagfpt(&[
        "--output", "csv", "test-ideal", "--exponents", "2,6", "--prime", "3", "--lambda", "2/3",
    ]);
    assert!(csv.ends_with(",x2^2;x1,\"[[[[0,2],1]],[[[1,0],1]]]\"\n"), "{csv}");
}
