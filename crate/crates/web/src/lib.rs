//! WebAssembly entry points for the browser demo. Every export takes plain
//! numbers or comma lists and returns a JSON string; failures come back as
//! `{"error": "..."}` so the page never has to catch.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use diagfpt_core::basep::{self, CarryFreePrefix, Prime};
use diagfpt_core::frobenius::{self, Limits};
use diagfpt_core::invariants::{self, DiagonalForm};
use diagfpt_core::{Error, Rational};

/// Widest prime range the curve will compute in one call.
const MAX_PRIME: u64 = 5000;
/// Digits shown per expansion.
const SHOWN_DIGITS: usize = 24;

fn respond(result: Result<Value, Error>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn parse_exponents(list: &str) -> Result<Vec<u64>, Error> {
    list.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Argument(format!("bad exponent {t:?}"))))
        .collect()
}

fn s(q: &Rational) -> String {
    q.to_string()
}

fn prefix(l: CarryFreePrefix) -> Value {
    match l {
        CarryFreePrefix::Finite(n) => json!(n),
        CarryFreePrefix::Infinite => json!("inf"),
    }
}

/// Threshold of the diagonal form for every prime in `lo..=hi`.
#[wasm_bindgen]
pub fn fpt_curve(exponents: &str, lo: u32, hi: u32) -> String {
    respond((|| {
        let exps = parse_exponents(exponents)?;
        if u64::from(hi) > MAX_PRIME {
            return Err(Error::Argument(format!("upper end above {MAX_PRIME}")));
        }
        let mut points = Vec::new();
        for p in (u64::from(lo)..=u64::from(hi)).filter(|&p| basep::is_prime(p)) {
            let form = DiagonalForm::unit(Prime::new(p)?, exps.clone())?;
            let v = invariants::fpt_diagonal_detailed(&form)?;
            points.push(json!({ "p": p, "fpt": s(&v.fpt), "prefix": prefix(v.prefix) }));
        }
        let first = DiagonalForm::unit(Prime::new(2)?, exps)?;
        Ok(json!({ "sum": s(&first.delta_sum()), "points": points }))
    })())
}

/// Base-`p` digits of each `1/d_i` and where their sum first carries.
#[wasm_bindgen]
pub fn digit_table(exponents: &str, p: u32) -> String {
    respond((|| {
        let p = Prime::new(u64::from(p))?;
        let form = DiagonalForm::unit(p, parse_exponents(exponents)?)?;
        let v = invariants::fpt_diagonal_detailed(&form)?;
        let mut rows = Vec::new();
        for (d, delta) in form.exponents().iter().zip(form.deltas()) {
            let x = basep::expansion(&delta, p)?;
            let digits: Vec<u64> = (1..=SHOWN_DIGITS as u64).map(|e| x.digit(e)).collect();
            rows.push(json!({
                "d": d,
                "preperiod": x.preperiod,
                "period": x.period,
                "digits": digits,
            }));
        }
        let fpt_digits = basep::expansion(&v.fpt, p)?;
        Ok(json!({
            "p": p.get(),
            "rows": rows,
            "prefix": prefix(v.prefix),
            "fpt": s(&v.fpt),
            "fpt_digits": (1..=SHOWN_DIGITS as u64).map(|e| fpt_digits.digit(e)).collect::<Vec<_>>(),
        }))
    })())
}

/// Jumps of the Fermat form in `(0, 1]`, plus a grid scan up to
/// `e_max` when it is positive. The scan runs under a small budget.
#[wasm_bindgen]
pub fn fermat_jumps(d: u32, p: u32, e_max: u32) -> String {
    respond((|| {
        let p = Prime::new(u64::from(p))?;
        let d = u64::from(d);
        let r = invariants::fermat_jumps_unit_interval(d, p)?;
        let mut out = json!({
            "fpt": s(&r.fpt),
            "jumps": r.extra_jumps.iter().map(s).collect::<Vec<_>>(),
            "complete": r.complete,
            "regime": r.regime.to_string(),
        });
        if e_max > 0 {
            let lim = Limits {
                max_terms: 2_000_000,
                ..Limits::default()
            };
            out["scan"] = match frobenius::jump_scan(d, p, e_max, &lim) {
                Ok(scan) => json!(scan.changes.iter().map(s).collect::<Vec<_>>()),
                Err(e) => json!({ "error": e.to_string() }),
            };
        }
        Ok(out)
    })())
}
