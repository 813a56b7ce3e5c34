//! Brute-force Frobenius oracle for diagonal hypersurfaces over `F_p`.
//!
//! Everything here is computed from the definitions: expansions of `f^N`,
//! the coefficient ideals `I_e`, membership in Frobenius powers, and the
//! largest `N` with `f^N` outside `m^{[e]}`.

mod expand;
mod ideal;
mod poly;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use expand::{
    basis_coefficient, carry_free_count, min_generator_degree, nogathering_member, pideal_generators,
    pideal_generators_graded, power_terms, projection_ideal_member, projection_power, term_coefficient,
    variable_membership, VariableMembership,
};
pub use ideal::{Echelon, IdealFp, Limits};
pub use poly::{monomials_of_degree, Monomial, PolyFp};

use crate::basep::{self, Prime};
use crate::error::{Error, Result};
use crate::invariants::DiagonalForm;
use crate::Rational;
use expand::prime_power;

/// Exponent vector `k` of a term `u^k x^{Dk}` in `f^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u64>);

impl MultiIndex {
    pub fn new(form: &DiagonalForm, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != form.nvars() {
            return Err(Error::Argument(format!(
                "multi-index has {} entries, form has {} variables",
                entries.len(),
                form.nvars()
            )));
        }
        Ok(MultiIndex(entries))
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    /// `|k|`
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

/// `x^r` with every `r_i < p^level`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisMonomial {
    exponents: Monomial,
    level: u32,
}

impl BasisMonomial {
    pub fn new(prime: Prime, exponents: Monomial, level: u32) -> Result<Self> {
        let pe = prime_power(prime, level)?;
        if let Some(x) = exponents.iter().find(|&&x| x >= pe) {
            return Err(Error::Domain {
                value: x.to_string(),
                domain: "[0, p^e)",
            });
        }
        Ok(BasisMonomial { exponents, level })
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn level(&self) -> u32 {
        self.level
    }
}

/// `f` itself as a polynomial.
pub fn form_polynomial(form: &DiagonalForm) -> PolyFp {
    let n = form.nvars();
    PolyFp::from_terms(
        form.prime(),
        n,
        form.exponents().iter().zip(form.coefficients()).enumerate().map(|(i, (&d, &u))| {
            let mut m = vec![0; n];
            m[i] = d;
            (m, u)
        }),
    )
}

/// `(f)`, graded by the weights that make `f` homogeneous.
pub fn principal_ideal(form: &DiagonalForm) -> IdealFp {
    IdealFp::with_weights(form.prime(), form.weights(), vec![form_polynomial(form)])
}

/// Writes `g = sum_mu c_mu^{p^e} mu` over the basis `B_e`, returning the
/// nonzero `c_mu`.
pub fn decompose(g: &PolyFp, e: u32) -> Result<BTreeMap<BasisMonomial, PolyFp>> {
    let p = g.prime();
    let pe = prime_power(p, e)?;
    let mut out: BTreeMap<BasisMonomial, PolyFp> = BTreeMap::new();
    for (m, c) in g.terms() {
        let r: Monomial = m.iter().map(|x| x % pe).collect();
        let q: Monomial = m.iter().map(|x| x / pe).collect();
        out.entry(BasisMonomial { exponents: r, level: e })
            .or_insert_with(|| PolyFp::zero(p, g.nvars()))
            .add_term(q, c);
    }
    Ok(out)
}

/// `I_e(g)`, generated by the basis coefficients of `g`.
pub fn coefficient_ideal(g: &PolyFp, e: u32) -> Result<IdealFp> {
    Ok(IdealFp::new(g.prime(), g.nvars(), decompose(g, e)?.into_values().collect()))
}

/// Decides `g in I^{[e]}` via `g in I^{[e]} iff I_e(g) is inside I`.
pub fn frobenius_power_membership(g: &PolyFp, ideal: &IdealFp, e: u32, limits: &Limits) -> Result<bool> {
    if g.prime() != ideal.prime() || g.nvars() != ideal.nvars() {
        return Err(Error::Argument("polynomial and ideal live in different rings".into()));
    }
    for c in decompose(g, e)?.values() {
        if !ideal.contains(c, limits)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest `N` with `f^N` not in `m^{[e]}`.
///
/// A term `x^{Dk}` of `f^N` avoids `m^{[e]}` iff every `k_i <= B_i =
/// floor((p^e - 1) / d_i)`, and it is present iff the `k_i` add without
/// carrying. So this maximizes `|k|` over carry-free `k <= B`, one base-`p`
/// digit position at a time from the top, tracking which `k_i` still agree
/// with `B_i` on the digits chosen so far.
pub fn nu(form: &DiagonalForm, e: u32, limits: &Limits) -> Result<u64> {
    if e == 0 {
        return Err(Error::Argument("e must be positive".into()));
    }
    let p = form.prime().get();
    let pe = prime_power(form.prime(), e)?;
    let n = form.nvars();
    if n > 24 {
        return Err(Error::Budget {
            what: "nu digit DP variables",
            needed: n as u128,
            limit: 24,
        });
    }
    let tuples = (1..=n as u128).fold(1u128, |acc, i| acc.saturating_mul(p as u128 - 1 + i) / i);
    let work = (e as u128).saturating_mul(1u128 << n).saturating_mul(tuples);
    if work > limits.max_terms as u128 {
        return Err(Error::Budget {
            what: "nu digit DP work",
            needed: work,
            limit: limits.max_terms as u128,
        });
    }
    let bounds: Vec<u64> = form.exponents().iter().map(|d| (pe - 1) / d).collect();
    let mut places = vec![1u64; e as usize];
    for t in 1..e as usize {
        places[t] = places[t - 1] * p;
    }

    struct Dp {
        p: u64,
        bounds: Vec<u64>,
        places: Vec<u64>,
        memo: HashMap<(usize, u32), u64>,
    }
    impl Dp {
        /// Best sum of the lowest `pos` digit positions.
        fn best(&mut self, pos: usize, tight: u32) -> u64 {
            if pos == 0 {
                return 0;
            }
            if let Some(&v) = self.memo.get(&(pos, tight)) {
                return v;
            }
            let t = pos - 1;
            let caps: Vec<u64> = self
                .bounds
                .iter()
                .enumerate()
                .map(|(j, b)| if tight >> j & 1 == 1 { b / self.places[t] % self.p } else { self.p - 1 })
                .collect();
            let mut choices = Vec::new();
            let mut digits = vec![0u64; caps.len()];
            self.tuples(0, 0, &caps, &mut digits, tight, &mut choices);
            let mut best = 0;
            for (sum, next) in choices {
                best = best.max(sum * self.places[t] + self.best(pos - 1, next));
            }
            self.memo.insert((pos, tight), best);
            best
        }

        fn tuples(
            &self,
            j: usize,
            sum: u64,
            caps: &[u64],
            digits: &mut Vec<u64>,
            tight: u32,
            out: &mut Vec<(u64, u32)>,
        ) {
            if j == caps.len() {
                let next = (0..caps.len())
                    .filter(|&i| tight >> i & 1 == 1 && digits[i] == caps[i])
                    .fold(0u32, |m, i| m | 1 << i);
                out.push((sum, next));
                return;
            }
            for c in 0..=caps[j].min(self.p - 1 - sum) {
                digits[j] = c;
                self.tuples(j + 1, sum + c, caps, digits, tight, out);
            }
            digits[j] = 0;
        }
    }
    let mut dp = Dp {
        p,
        bounds,
        places,
        memo: HashMap::new(),
    };
    Ok(dp.best(e as usize, (1u32 << n) - 1))
}

/// `(nu / p^e, (nu + 1) / p^e)`; the fpt lies in the half-open interval
/// `(lower, upper]`.
pub fn fpt_bracket(form: &DiagonalForm, e: u32, limits: &Limits) -> Result<(Rational, Rational)> {
    let v = nu(form, e, limits)?;
    let pe = BigInt::from(prime_power(form.prime(), e)?);
    Ok((
        Rational::new(BigInt::from(v), pe.clone()),
        Rational::new(BigInt::from(v + 1), pe),
    ))
}

/// How a returned test ideal was pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stabilization {
    /// `lambda` has a `p`-power denominator, so one level is exact.
    Exact,
    /// Two consecutive levels agreed; the union need not have stopped.
    StabilizedHeuristically,
}

impl fmt::Display for Stabilization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stabilization::Exact => "exact",
            Stabilization::StabilizedHeuristically => "stabilized-heuristically",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestIdeal {
    pub ideal: IdealFp,
    /// The level `e` the ideal was read off at.
    pub level: u32,
    /// `N = ceil(p^e lambda)`.
    pub power: u64,
    pub stabilization: Stabilization,
}

/// Levels tried past the first when `lambda` has no `p`-power denominator.
const HEURISTIC_LEVELS: u32 = 6;

/// `ceil(p^e lambda)` as a machine integer.
fn ceil_scaled(lambda: &Rational, p: Prime, e: u32) -> Result<u64> {
    let scaled = (lambda * Rational::from_integer(p.pow(e))).ceil().to_integer();
    scaled.to_u64().ok_or(Error::Budget {
        what: "p^e lambda",
        needed: u128::MAX,
        limit: u64::MAX as u128,
    })
}

fn check_lambda(lambda: &Rational) -> Result<()> {
    if lambda <= &Rational::zero() {
        return Err(Error::Domain {
            value: lambda.to_string(),
            domain: "lambda > 0",
        });
    }
    Ok(())
}

/// The level and power at which `tau(f^lambda)` is read off exactly, for
/// `lambda` with a `p`-power denominator.
pub fn exact_level(form: &DiagonalForm, lambda: &Rational, e_hint: u32) -> Result<Option<(u32, u64)>> {
    check_lambda(lambda)?;
    let p = form.prime();
    Ok(match basep::p_power_denominator(lambda, p) {
        Some(m) => {
            let e = m.max(e_hint).max(1);
            Some((e, ceil_scaled(lambda, p, e)?))
        }
        None => None,
    })
}

/// `tau(f^lambda)`.
pub fn test_ideal(form: &DiagonalForm, lambda: &Rational, e_hint: u32, limits: &Limits) -> Result<TestIdeal> {
    if let Some((level, power)) = exact_level(form, lambda, e_hint)? {
        return Ok(TestIdeal {
            ideal: pideal_generators(form, power, level, limits)?,
            level,
            power,
            stabilization: Stabilization::Exact,
        });
    }
    let p = form.prime();
    let first = e_hint.max(1);
    let mut previous: Option<(u32, u64, IdealFp)> = None;
    for e in first..=first + HEURISTIC_LEVELS {
        let power = ceil_scaled(lambda, p, e)?;
        let current = match pideal_generators(form, power, e, limits) {
            Ok(ideal) => ideal,
            Err(Error::Budget { what, needed, limit }) => {
                return Err(Error::Inconclusive(format!(
                    "no stabilization before {what} exceeded its budget ({needed} > {limit}) at level {e}; last ideal: {}",
                    previous.map(|(_, _, i)| i.to_string()).unwrap_or_else(|| "none".into())
                )));
            }
            Err(other) => return Err(other),
        };
        if let Some((_, _, prev)) = &previous {
            if prev.equals(&current, limits)? {
                return Ok(TestIdeal {
                    ideal: current,
                    level: e,
                    power,
                    stabilization: Stabilization::StabilizedHeuristically,
                });
            }
        }
        previous = Some((e, power, current));
    }
    Err(Error::Inconclusive(format!(
        "levels {first} to {} never repeated; last ideal: {}",
        first + HEURISTIC_LEVELS,
        previous.map(|(_, _, i)| i.to_string()).unwrap_or_default()
    )))
}

/// Unit / variable membership of `tau(f^lambda)` without expanding all of
/// `f^N`. Needs a `p`-power denominator.
pub fn test_ideal_variables(
    form: &DiagonalForm,
    lambda: &Rational,
    e_hint: u32,
    limits: &Limits,
) -> Result<VariableMembership> {
    match exact_level(form, lambda, e_hint)? {
        Some((level, power)) => variable_membership(form, power, level, limits),
        None => Err(Error::Unsupported(format!(
            "{lambda} does not have a power of {} as denominator",
            form.prime()
        ))),
    }
}

/// Shape of `I_e(f^N)` for a Fermat form at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum ScanClass {
    Unit,
    /// Contains every variable but not 1, hence equals `m`.
    AllVariables,
    /// Proper and misses the variables; `min_degree` is the smallest degree
    /// of a generator.
    Smaller { min_degree: u64 },
}

impl fmt::Display for ScanClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanClass::Unit => f.write_str("unit"),
            ScanClass::AllVariables => f.write_str("maximal"),
            ScanClass::Smaller { min_degree } => write!(f, "smaller(deg {min_degree})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpScan {
    pub degree: u64,
    pub prime: Prime,
    pub e_max: u32,
    /// `classes[m - 1]` is the class at `lambda = m / p^{e_max}`.
    pub classes: Vec<ScanClass>,
    /// Grid points whose class differs from the previous point's.
    #[serde(with = "crate::ratio_serde::vec")]
    pub changes: Vec<Rational>,
}

impl JumpScan {
    pub fn class_at(&self, lambda: &Rational) -> Option<ScanClass> {
        let m = ceil_scaled(lambda, self.prime, self.e_max).ok()?;
        self.classes.get((m as usize).checked_sub(1)?).copied()
    }

    /// First change strictly above `lambda`.
    pub fn next_change_after(&self, lambda: &Rational) -> Option<&Rational> {
        self.changes.iter().find(|c| *c > lambda)
    }
}

/// Classifies `tau(f^{m / p^e})` for every `m` in `1..=p^e` and reports where
/// the class changes. Changes are only as fine as the grid, and a jump that
/// leaves the class alone is missed, so this is a detector, not a proof.
pub fn jump_scan(d: u64, p: Prime, e_max: u32, limits: &Limits) -> Result<JumpScan> {
    if p.get() <= d {
        return Err(Error::Hypothesis(format!("jump scan needs p > d, got d = {d}, p = {p}")));
    }
    if e_max == 0 {
        return Err(Error::Argument("e_max must be positive".into()));
    }
    let pe = prime_power(p, e_max)?;
    if pe > limits.max_terms {
        return Err(Error::Budget {
            what: "jump scan grid points",
            needed: pe as u128,
            limit: limits.max_terms as u128,
        });
    }
    let form = DiagonalForm::fermat(d, p)?;
    let mut classes = Vec::with_capacity(pe as usize);
    let mut changes = Vec::new();
    for m in 1..=pe {
        let min_degree = min_generator_degree(&form, m, e_max, limits)?;
        // the variables are interchangeable, so x_1 speaks for all
        let class = if min_degree == 0 {
            ScanClass::Unit
        } else if nogathering_member(d, p, e_max, m, 0, limits)? {
            ScanClass::AllVariables
        } else {
            ScanClass::Smaller { min_degree }
        };
        if classes.last().is_some_and(|prev| *prev != class) {
            changes.push(Rational::new(m.into(), pe.into()));
        }
        classes.push(class);
    }
    Ok(JumpScan {
        degree: d,
        prime: p,
        e_max,
        classes,
        changes,
    })
}
