//! Base-`p` digit machinery for rationals in `(0, 1]`.
//!
//! Every rational here is expanded with the *non-terminating* convention:
//! a value such as `1/p` is written `.0 (p-1)(p-1)...` rather than `.1`.
//! Digits are read off the ceiling identity
//! `ceil(p^e * a) = p^e * trunc_e(a) + 1`, which bakes the convention in
//! without a special case for terminating expansions.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rational;

/// A prime number, checked on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn pow(self, e: u32) -> BigInt {
        BigInt::from(self.0).pow(e)
    }

    /// `p^e` as a machine integer, if it fits.
    pub fn pow_u64(self, e: u32) -> Option<u64> {
        self.0.checked_pow(e)
    }

    /// True when `n` is `p^k` for some `k >= 1`.
    pub fn is_power(self, mut n: u64) -> bool {
        if n < self.0 {
            return false;
        }
        while n.is_multiple_of(self.0) {
            n /= self.0;
        }
        n == 1
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Inverse of a nonzero residue modulo a prime.
pub fn inv_mod(a: u64, p: Prime) -> u64 {
    debug_assert!(!a.is_multiple_of(p.get()));
    pow_mod(a, p.get() - 2, p.get())
}

fn check_unit_interval(alpha: &Rational, allow_zero: bool) -> Result<()> {
    let ok_low = if allow_zero {
        !alpha.is_negative()
    } else {
        alpha.is_positive()
    };
    if ok_low && *alpha <= Rational::one() {
        Ok(())
    } else {
        Err(Error::Domain {
            value: alpha.to_string(),
            domain: if allow_zero { "[0, 1]" } else { "(0, 1]" },
        })
    }
}

/// `ceil(p^e * alpha) - 1`, i.e. `p^e` times the `e`-th truncation.
fn scaled_truncation(alpha: &Rational, p: Prime, e: u32) -> BigInt {
    let scaled = alpha * Rational::from_integer(p.pow(e));
    scaled.ceil().to_integer() - 1
}

/// The `e`-th digit of the non-terminating base-`p` expansion of `alpha`.
///
/// `digit(alpha, p, 0) = 0` and `digit(0, p, e) = 0` by convention.
pub fn digit(alpha: &Rational, p: Prime, e: u32) -> Result<u64> {
    check_unit_interval(alpha, true)?;
    if e == 0 || alpha.is_zero() {
        return Ok(0);
    }
    let hi = scaled_truncation(alpha, p, e);
    let lo = scaled_truncation(alpha, p, e - 1);
    let d = hi - lo * BigInt::from(p.get());
    Ok(d.to_u64().expect("digit lies in [0, p-1]"))
}

/// The `e`-th truncation `sum_{d<=e} digit_d / p^d`. Zero at `e = 0`.
pub fn truncate(alpha: &Rational, p: Prime, e: u32) -> Result<Rational> {
    check_unit_interval(alpha, false)?;
    if e == 0 {
        return Ok(Rational::zero());
    }
    Ok(Rational::new(scaled_truncation(alpha, p, e), p.pow(e)))
}

/// Eventually periodic digit stream of a rational in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitExpansion {
    pub prime: Prime,
    pub preperiod: Vec<u64>,
    pub period: Vec<u64>,
}

impl DigitExpansion {
    pub fn digit(&self, e: u64) -> u64 {
        if e == 0 {
            return 0;
        }
        let idx = (e - 1) as usize;
        if idx < self.preperiod.len() {
            self.preperiod[idx]
        } else {
            self.period[(idx - self.preperiod.len()) % self.period.len()]
        }
    }

    /// Reassembles the rational the digits describe.
    pub fn value(&self) -> Rational {
        let p = BigInt::from(self.prime.get());
        let mut pre = BigInt::zero();
        for &d in &self.preperiod {
            pre = pre * &p + d;
        }
        let mut rep = BigInt::zero();
        for &d in &self.period {
            rep = rep * &p + d;
        }
        let pre_scale = p.pow(self.preperiod.len() as u32);
        let rep_scale = p.pow(self.period.len() as u32) - 1;
        Rational::new(pre, pre_scale.clone()) + Rational::new(rep, rep_scale * pre_scale)
    }
}

impl fmt::Display for DigitExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ds: &[u64]| {
            ds.iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, ".")?;
        if !self.preperiod.is_empty() {
            write!(f, "{} ", join(&self.preperiod))?;
        }
        write!(f, "({}) base {}", join(&self.period), self.prime)
    }
}

/// Finite description of the non-terminating expansion of `alpha`.
///
/// Long division with remainders remembered in insertion order; a
/// terminating expansion is rewritten with its last nonzero digit lowered
/// by one and a trailing `(p-1)` period.
pub fn expansion(alpha: &Rational, p: Prime) -> Result<DigitExpansion> {
    check_unit_interval(alpha, false)?;
    let pm1 = p.get() - 1;
    if alpha.is_one() {
        return Ok(DigitExpansion {
            prime: p,
            preperiod: Vec::new(),
            period: vec![pm1],
        });
    }
    let den = alpha.denom().clone();
    let pb = BigInt::from(p.get());
    let mut rem = alpha.numer().clone();
    let mut digits = Vec::new();
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    loop {
        if rem.is_zero() {
            // Terminating: .d1 ... dk  ==  .d1 ... (dk - 1) (p-1)(p-1)...
            let last = digits.last_mut().expect("alpha > 0 has a nonzero digit");
            *last -= 1;
            return Ok(DigitExpansion {
                prime: p,
                preperiod: digits,
                period: vec![pm1],
            });
        }
        if let Some(&start) = seen.get(&rem) {
            let period = digits.split_off(start);
            return Ok(DigitExpansion {
                prime: p,
                preperiod: digits,
                period,
            });
        }
        seen.insert(rem.clone(), digits.len());
        let (q, r) = (rem * &pb).div_rem(&den);
        digits.push(q.to_u64().expect("digit < p"));
        rem = r;
    }
}

/// Whether the `e`-th digits of `values` sum to at most `p - 1`.
pub fn adds_without_carrying(values: &[Rational], p: Prime, e: u32) -> Result<bool> {
    let mut total = 0u64;
    for v in values {
        total += digit(v, p, e)?;
    }
    Ok(total < p.get())
}

/// Length of the longest carry-free prefix of digit positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CarryFreePrefix {
    Finite(u64),
    Infinite,
}

impl CarryFreePrefix {
    pub fn is_infinite(self) -> bool {
        matches!(self, CarryFreePrefix::Infinite)
    }
}

impl fmt::Display for CarryFreePrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CarryFreePrefix::Finite(n) => n.fmt(f),
            CarryFreePrefix::Infinite => f.write_str("inf"),
        }
    }
}

/// `sup { N : digits 1..=N of values add without carrying }`.
///
/// All expansions are jointly periodic past the longest preperiod with
/// period the lcm of their periods, so scanning that window decides
/// `Infinite` exactly.
pub fn carry_free_prefix(values: &[Rational], p: Prime) -> Result<CarryFreePrefix> {
    let expansions = values
        .iter()
        .map(|v| expansion(v, p))
        .collect::<Result<Vec<_>>>()?;
    let mut window = BigUint::one();
    let mut preperiod = 0u64;
    for x in &expansions {
        window = window.lcm(&BigUint::from(x.period.len()));
        preperiod = preperiod.max(x.preperiod.len() as u64);
    }
    let window = window.to_u64().ok_or(Error::Budget {
        what: "joint digit period",
        needed: u128::MAX,
        limit: u64::MAX as u128,
    })?;
    let end = preperiod.checked_add(window).ok_or(Error::Budget {
        what: "joint digit period",
        needed: preperiod as u128 + window as u128,
        limit: u64::MAX as u128,
    })?;
    for e in 1..=end {
        let total: u64 = expansions.iter().map(|x| x.digit(e)).sum();
        if total >= p.get() {
            return Ok(CarryFreePrefix::Finite(e - 1));
        }
    }
    Ok(CarryFreePrefix::Infinite)
}

/// Base-`p` digits of `n`, least significant first.
pub fn int_digits(mut n: u64, p: Prime) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 0 {
        out.push(n % p.get());
        n /= p.get();
    }
    out
}

/// Whether `|k|! / (k_1! ... k_n!)` is nonzero mod `p`, via Lucas: the
/// entries must add without carrying in base `p`.
pub fn multinomial_nonzero_mod_p(k: &[u64], p: Prime) -> bool {
    let mut rest: Vec<u64> = k.to_vec();
    while rest.iter().any(|&x| x > 0) {
        let mut total = 0;
        for x in rest.iter_mut() {
            total += *x % p.get();
            *x /= p.get();
        }
        if total >= p.get() {
            return false;
        }
    }
    true
}

/// The multinomial `|k|! / prod k_i!` reduced mod `p`, digit by digit.
pub fn multinomial_mod_p(k: &[u64], p: Prime) -> u64 {
    let pv = p.get();
    let mut rest: Vec<u64> = k.to_vec();
    let mut acc = 1u64;
    while rest.iter().any(|&x| x > 0) {
        // multinomial of one digit column, all partial sums stay below p
        let mut n = 0u64;
        for x in rest.iter_mut() {
            let d = *x % pv;
            *x /= pv;
            for t in 1..=d {
                if n + t >= pv {
                    return 0;
                }
                acc = mul_mod(acc, (n + t) % pv, pv);
                acc = mul_mod(acc, inv_mod(t, p), pv);
            }
            n += d;
        }
    }
    acc
}

/// Exponent `m` with `denominator(q) = p^m`, if there is one.
pub fn p_power_denominator(q: &Rational, p: Prime) -> Option<u32> {
    let pb = BigInt::from(p.get());
    let mut den = q.denom().clone();
    let mut m = 0;
    while den.is_multiple_of(&pb) {
        den /= &pb;
        m += 1;
    }
    den.is_one().then_some(m)
}
