//! Request/report layer behind the `diagfpt` binary. Everything here is
//! deterministic: the same request always renders to the same bytes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use diagfpt_core::basep::{self, Prime};
use diagfpt_core::frobenius::{self, Limits, Stabilization};
use diagfpt_core::invariants::{self, DiagonalForm, FermatDecomposition, TestIdealTag};
use diagfpt_core::{Error, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Fpt,
    FermatFpt,
    TestIdeal,
    Jumping,
    Nu,
    Verify,
    Sweep,
    JumpScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exponents: Vec<u64>,
    /// Fermat degree; stands in for `d` copies of `d` as exponents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    /// Inclusive prime range for `sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<(u64, u64)>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub lambda: Option<Rational>,
    /// `e` for `nu`, `verify` and `test-ideal`; `e_max` for `jump-scan`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<u64>>,
    #[serde(default)]
    pub output: Output,
    pub limits: Limits,
}

mod opt_rational {
    pub use diagfpt_core::ratio_serde::option::*;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Unknown,
    Inconclusive,
    Error,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Unknown => "unknown",
            Status::Inconclusive => "inconclusive",
            Status::Error => "error",
        })
    }
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Unknown | Status::Inconclusive => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub request: Request,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub result: Value,
}

/// Sweep rows are a list; everything else is a single object.
fn is_table(result: &Value) -> bool {
    result.get("rows").is_some_and(Value::is_array)
}

struct Outcome {
    status: Status,
    reason: Option<String>,
    result: Value,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome {
            status: Status::Ok,
            reason: None,
            result,
        }
    }
}

fn status_of(err: &Error) -> Status {
    match err {
        Error::Budget { .. } | Error::Inconclusive(_) => Status::Inconclusive,
        _ => Status::Error,
    }
}

fn s(q: &Rational) -> Value {
    Value::String(q.to_string())
}

fn list(qs: &[Rational]) -> Value {
    Value::Array(qs.iter().map(s).collect())
}

pub fn run(request: &Request) -> Report {
    let outcome = dispatch(request).unwrap_or_else(|err| Outcome {
        status: status_of(&err),
        reason: Some(err.to_string()),
        result: Value::Object(Map::new()),
    });
    Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        request: request.clone(),
        status: outcome.status,
        reason: outcome.reason,
        result: outcome.result,
    }
}

fn need<T: Copy>(v: Option<T>, what: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::Argument(format!("missing --{what}")))
}

fn prime(request: &Request) -> Result<Prime, Error> {
    Prime::new(need(request.prime, "prime")?)
}

/// Exponents from `--exponents` or `--degree`.
fn exponents(request: &Request) -> Result<Vec<u64>, Error> {
    match (request.exponents.is_empty(), request.degree) {
        (false, None) => Ok(request.exponents.clone()),
        (true, Some(d)) => {
            if d < 2 {
                return Err(Error::Argument(format!("degree {d} < 2")));
            }
            Ok(vec![d; d as usize])
        }
        (false, Some(_)) => Err(Error::Argument("give --exponents or --degree, not both".into())),
        (true, None) => Err(Error::Argument("missing --exponents".into())),
    }
}

fn form(request: &Request, p: Prime) -> Result<DiagonalForm, Error> {
    let exps = exponents(request)?;
    match &request.coefficients {
        Some(c) => DiagonalForm::new(p, exps, c.clone()),
        None => DiagonalForm::unit(p, exps),
    }
}

fn dispatch(request: &Request) -> Result<Outcome, Error> {
    let lim = &request.limits;
    match request.command {
        Command::Fpt => {
            let f = form(request, prime(request)?)?;
            Ok(Outcome::ok(json!({ "fpt": s(&invariants::fpt_diagonal(&f)?) })))
        }
        Command::FermatFpt => {
            let d = need(request.degree, "degree")?;
            let p = prime(request)?;
            let case = match FermatDecomposition::new(d, p)? {
                FermatDecomposition::Residue { omega, a } => json!({ "omega": omega, "a": a }),
                FermatDecomposition::PowerRange { ell } => json!({ "ell": ell }),
            };
            Ok(Outcome::ok(json!({ "fpt": s(&invariants::fpt_fermat(d, p)?), "case": case })))
        }
        Command::Jumping => {
            let d = need(request.degree, "degree")?;
            let r = invariants::fermat_jumps_unit_interval(d, prime(request)?)?;
            Ok(Outcome::ok(json!({
                "fpt": s(&r.fpt),
                "jumps": list(&r.extra_jumps),
                "complete": r.complete,
                "regime": r.regime.to_string(),
            })))
        }
        Command::Nu => {
            let f = form(request, prime(request)?)?;
            let e = need(request.e, "e")?;
            let nu = frobenius::nu(&f, e, lim)?;
            let (lo, hi) = frobenius::fpt_bracket(&f, e, lim)?;
            Ok(Outcome::ok(json!({ "nu": nu, "bracket": [s(&lo), s(&hi)] })))
        }
        Command::TestIdeal => test_ideal(request),
        Command::Verify => verify(request),
        Command::Sweep => sweep(request),
        Command::JumpScan => {
            let d = need(request.degree, "degree")?;
            let e = need(request.e, "e")?;
            let scan = frobenius::jump_scan(d, prime(request)?, e, lim)?;
            Ok(Outcome::ok(json!({
                "e_max": e,
                "changes": list(&scan.changes),
                "classes_after": scan
                    .changes
                    .iter()
                    .map(|c| scan.class_at(c).map(|k| k.to_string()).unwrap_or_default())
                    .collect::<Vec<_>>(),
                "heuristic": true,
            })))
        }
    }
}

fn test_ideal(request: &Request) -> Result<Outcome, Error> {
    let lim = &request.limits;
    let f = form(request, prime(request)?)?;
    let fpt = invariants::fpt_diagonal(&f)?;
    let Some(lambda) = &request.lambda else {
        let class = invariants::classify_test_ideal_at_fpt(&f)?;
        let result = json!({
            "fpt": s(&fpt),
            "class": class.tag.to_string(),
            "witness": serde_json::to_value(class.witness).expect("plain enum"),
        });
        return Ok(if class.tag == TestIdealTag::Unknown {
            Outcome {
                status: Status::Unknown,
                reason: Some("no closed form applies; try --lambda with the oracle".into()),
                result,
            }
        } else {
            Outcome::ok(result)
        });
    };
    let t = frobenius::test_ideal(&f, lambda, request.e.unwrap_or(0), lim)?;
    let unit = t.ideal.is_unit(lim)?;
    let shape = if unit {
        "unit"
    } else if t.ideal.contains_all_variables(lim)? {
        "maximal"
    } else if t.ideal.equals(&frobenius::principal_ideal(&f), lim)? {
        "principal-f"
    } else {
        "other"
    };
    let gens = t
        .ideal
        .minimal_generators(lim)
        .unwrap_or_else(|_| t.ideal.generators().to_vec());
    Ok(Outcome::ok(json!({
        "lambda": s(lambda),
        "level": t.level,
        "power": t.power,
        "stabilization": t.stabilization.to_string(),
        "shape": shape,
        "generators": gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        // sorted (exponents, coefficient) pairs per generator
        "generator_terms": gens
            .iter()
            .map(|g| g.terms().map(|(m, c)| json!([m, c])).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })))
}

fn verify(request: &Request) -> Result<Outcome, Error> {
    let lim = &request.limits;
    let f = form(request, prime(request)?)?;
    let e_max = request.e.unwrap_or(2).max(1);
    let fpt = invariants::fpt_diagonal(&f)?;
    let mut brackets = Vec::new();
    let mut agree = true;
    let mut inconclusive: Option<String> = None;
    for e in 1..=e_max {
        match frobenius::fpt_bracket(&f, e, lim) {
            Ok((lo, hi)) => {
                let inside = lo < fpt && fpt <= hi;
                agree &= inside;
                brackets.push(json!({ "e": e, "lower": s(&lo), "upper": s(&hi), "contains_fpt": inside }));
            }
            Err(err @ (Error::Budget { .. } | Error::Inconclusive(_))) => {
                inconclusive = Some(err.to_string());
                break;
            }
            Err(err) => return Err(err),
        }
    }
    let class = invariants::classify_test_ideal_at_fpt(&f)?;
    let mut ideal_check = json!({ "class": class.tag.to_string() });
    if class.tag != TestIdealTag::Unknown {
        match frobenius::test_ideal(&f, &fpt, 0, lim).and_then(|t| {
            let ok = match class.tag {
                TestIdealTag::PrincipalF => t.ideal.equals(&frobenius::principal_ideal(&f), lim)?,
                _ => t.ideal.is_maximal_ideal(lim)?,
            };
            Ok((ok, t.stabilization))
        }) {
            Ok((ok, how)) => {
                // a heuristic level pair is not proof of disagreement
                if how == Stabilization::Exact {
                    agree &= ok;
                } else if !ok {
                    inconclusive.get_or_insert_with(|| "heuristic stabilization disagrees".into());
                }
                ideal_check["oracle_agrees"] = json!(ok);
                ideal_check["stabilization"] = json!(how.to_string());
            }
            Err(err @ (Error::Budget { .. } | Error::Inconclusive(_))) => {
                inconclusive.get_or_insert(err.to_string());
            }
            Err(err) => return Err(err),
        }
    }
    let result = json!({
        "fpt": s(&fpt),
        "brackets": brackets,
        "test_ideal": ideal_check,
        "agree": agree,
    });
    Ok(if !agree {
        Outcome {
            status: Status::Error,
            reason: Some("formula and oracle disagree".into()),
            result,
        }
    } else if let Some(why) = inconclusive {
        Outcome {
            status: Status::Inconclusive,
            reason: Some(why),
            result,
        }
    } else {
        Outcome::ok(result)
    })
}

fn sweep(request: &Request) -> Result<Outcome, Error> {
    let (lo, hi) = request
        .primes
        .ok_or_else(|| Error::Argument("missing --primes".into()))?;
    if lo > hi {
        return Err(Error::Argument(format!("empty prime range {lo}..{hi}")));
    }
    let exps = exponents(request)?;
    let fermat = exps.iter().all(|&d| d == exps[0]) && exps.len() as u64 == exps[0];
    let lcm = exps.iter().fold(1u64, |acc, &d| num_integer::lcm(acc, d));
    let mut rows = Vec::new();
    for p in (lo..=hi).filter(|&p| basep::is_prime(p)) {
        let prime = Prime::new(p)?;
        let f = form(request, prime)?;
        let detail = invariants::fpt_diagonal_detailed(&f)?;
        let class = invariants::classify_test_ideal_at_fpt(&f)?;
        let regime = if fermat && p > exps[0] {
            invariants::fermat_jumps_unit_interval(exps[0], prime)?.regime.to_string()
        } else {
            String::new()
        };
        rows.push(json!({
            "p": p,
            "fpt": s(&detail.fpt),
            "L": detail.prefix.to_string(),
            "class": class.tag.to_string(),
            "residue": p % lcm,
            "regime": regime,
        }));
    }
    Ok(Outcome::ok(json!({ "lcm": lcm, "rows": rows })))
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::String(t) => t.clone(),
        // flat lists join with ';', anything nested stays JSON
        Value::Array(items) if !items.iter().any(|i| i.is_array() || i.is_object()) => {
            items.iter().map(csv_cell).collect::<Vec<_>>().join(";")
        }
        Value::Array(_) | Value::Object(_) => v.to_string(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn csv_table(rows: &[&Map<String, Value>]) -> String {
    let mut out = String::new();
    let Some(first) = rows.first() else { return out };
    let header: Vec<&String> = first.keys().collect();
    writeln!(out, "{}", header.iter().map(|h| h.as_str()).collect::<Vec<_>>().join(",")).unwrap();
    for row in rows {
        let cells: Vec<String> = header.iter().map(|h| row.get(*h).map(csv_cell).unwrap_or_default()).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(t) => t.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(text_value).collect::<Vec<_>>().join(", ")),
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| format!("{k}={}", text_value(v)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}

/// Renders the report for stdout.
pub fn render(report: &Report, output: Output) -> String {
    match output {
        Output::Json => {
            let mut text = serde_json::to_string(report).expect("report serializes");
            text.push('\n');
            text
        }
        Output::Csv => {
            let empty = Map::new();
            let result = report.result.as_object().unwrap_or(&empty);
            if is_table(&report.result) {
                let rows: Vec<&Map<String, Value>> = report.result["rows"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .filter_map(Value::as_object)
                    .collect();
                csv_table(&rows)
            } else {
                csv_table(&[result])
            }
        }
        Output::Text => {
            let mut out = String::new();
            if let Some(reason) = &report.reason {
                writeln!(out, "{}: {reason}", report.status).unwrap();
            }
            if is_table(&report.result) {
                for row in report.result["rows"].as_array().unwrap() {
                    writeln!(out, "{}", text_value(row)).unwrap();
                }
            } else if let Some(m) = report.result.as_object() {
                for (k, v) in m {
                    writeln!(out, "{k}: {}", text_value(v)).unwrap();
                }
            }
            out
        }
    }
}

/// Parses `a..b` or `a..=b`; both ends are included either way.
pub fn parse_range(text: &str) -> Result<(u64, u64), String> {
    let (a, b) = text
        .split_once("..=")
        .or_else(|| text.split_once(".."))
        .ok_or_else(|| format!("expected a range like 2..200, got {text:?}"))?;
    let a = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
    Ok((a, b))
}

pub fn parse_rational(text: &str) -> Result<Rational, String> {
    diagfpt_core::ratio_serde::parse(text)
}
