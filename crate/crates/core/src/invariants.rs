//! Closed-form F-invariants of diagonal and Fermat hypersurfaces.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::basep::{self, CarryFreePrefix, Prime};
use crate::error::{Error, Result};
use crate::Rational;

/// `f = u_1 x_1^{d_1} + ... + u_n x_n^{d_n}` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagonalForm {
    prime: Prime,
    exponents: Vec<u64>,
    coefficients: Vec<u64>,
}

impl DiagonalForm {
    pub fn new(prime: Prime, exponents: Vec<u64>, coefficients: Vec<u64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::Argument("a diagonal form needs at least one variable".into()));
        }
        if let Some(d) = exponents.iter().find(|&&d| d < 2) {
            return Err(Error::Argument(format!("exponent {d} < 2")));
        }
        if coefficients.len() != exponents.len() {
            return Err(Error::Argument(format!(
                "{} coefficients for {} exponents",
                coefficients.len(),
                exponents.len()
            )));
        }
        let coefficients: Vec<u64> = coefficients.iter().map(|u| u % prime.get()).collect();
        if coefficients.contains(&0) {
            return Err(Error::Argument("coefficients must be nonzero mod p".into()));
        }
        Ok(DiagonalForm {
            prime,
            exponents,
            coefficients,
        })
    }

    /// All coefficients equal to one.
    pub fn unit(prime: Prime, exponents: Vec<u64>) -> Result<Self> {
        let ones = vec![1; exponents.len()];
        Self::new(prime, exponents, ones)
    }

    /// `x_1^d + ... + x_d^d`.
    pub fn fermat(d: u64, prime: Prime) -> Result<Self> {
        Self::unit(prime, vec![d; d as usize])
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn nvars(&self) -> usize {
        self.exponents.len()
    }

    /// The common degree, when this is a Fermat form (`n = d`, all `d_i = d`).
    pub fn fermat_degree(&self) -> Option<u64> {
        let d = self.exponents[0];
        (self.exponents.iter().all(|&x| x == d) && self.nvars() as u64 == d).then_some(d)
    }

    pub fn max_exponent(&self) -> u64 {
        *self.exponents.iter().max().unwrap()
    }

    /// `(1/d_1, ..., 1/d_n)`.
    pub fn deltas(&self) -> Vec<Rational> {
        self.exponents
            .iter()
            .map(|&d| Rational::new(1.into(), d.into()))
            .collect()
    }

    pub fn delta_sum(&self) -> Rational {
        self.deltas().into_iter().fold(Rational::zero(), |a, b| a + b)
    }

    /// lcm of the exponents; `f` is homogeneous of this degree when
    /// `x_i` carries weight `lcm / d_i`.
    pub fn weighted_degree(&self) -> u64 {
        self.exponents.iter().fold(1, |acc, &d| acc.lcm(&d))
    }

    pub fn weights(&self) -> Vec<u64> {
        let l = self.weighted_degree();
        self.exponents.iter().map(|&d| l / d).collect()
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (d, u)) in self.exponents.iter().zip(&self.coefficients).enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if *u != 1 {
                write!(f, "{u}*")?;
            }
            write!(f, "x{}^{d}", i + 1)?;
        }
        write!(f, " over F_{}", self.prime)
    }
}

/// The threshold together with the carry-free prefix it was read from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FptValue {
    pub fpt: Rational,
    pub prefix: CarryFreePrefix,
}

/// F-pure threshold of a diagonal hypersurface.
///
/// With `L` the carry-free prefix length of the digits of `1/d_i`, this is
/// `sum 1/d_i` when `L` is infinite and `sum trunc_L(1/d_i) + 1/p^L`
/// otherwise. The coefficients never enter.
pub fn fpt_diagonal(form: &DiagonalForm) -> Result<Rational> {
    fpt_diagonal_detailed(form).map(|v| v.fpt)
}

pub fn fpt_diagonal_detailed(form: &DiagonalForm) -> Result<FptValue> {
    let p = form.prime();
    let deltas = form.deltas();
    let prefix = basep::carry_free_prefix(&deltas, p)?;
    let fpt = match prefix {
        CarryFreePrefix::Infinite => deltas.iter().fold(Rational::zero(), |a, b| a + b),
        CarryFreePrefix::Finite(l) => {
            let l = u32::try_from(l).map_err(|_| Error::Argument("prefix too long".into()))?;
            let mut acc = Rational::new(1.into(), p.pow(l));
            for delta in &deltas {
                acc += basep::truncate(delta, p, l)?;
            }
            acc
        }
    };
    Ok(FptValue { fpt, prefix })
}

/// How `p` sits relative to a Fermat degree `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FermatDecomposition {
    /// `p > d`, `p = d * omega + a` with `1 <= a < d`.
    Residue { omega: u64, a: u64 },
    /// `p^ell <= d < p^(ell + 1)` with `ell >= 1`.
    PowerRange { ell: u32 },
}

impl FermatDecomposition {
    pub fn new(d: u64, p: Prime) -> Result<Self> {
        if d < 2 {
            return Err(Error::Argument(format!("degree {d} < 2")));
        }
        let pv = p.get();
        if pv > d {
            // p prime and p > d >= 2 means d does not divide p
            Ok(FermatDecomposition::Residue {
                omega: pv / d,
                a: pv % d,
            })
        } else {
            let mut ell = 0u32;
            let mut power = 1u64;
            while power.checked_mul(pv).is_some_and(|next| next <= d) {
                power *= pv;
                ell += 1;
            }
            Ok(FermatDecomposition::PowerRange { ell })
        }
    }
}

/// F-pure threshold of the degree-`d` Fermat hypersurface in `d` variables.
pub fn fpt_fermat(d: u64, p: Prime) -> Result<Rational> {
    Ok(match FermatDecomposition::new(d, p)? {
        FermatDecomposition::PowerRange { ell } => Rational::new(1.into(), p.pow(ell)),
        FermatDecomposition::Residue { a, .. } => {
            Rational::one() - Rational::new((a - 1).into(), p.get().into())
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TestIdealTag {
    /// `tau(f^fpt) = (f)`
    PrincipalF,
    /// `tau(f^fpt) = (x_1, ..., x_n)`
    Maximal,
    Unknown,
}

impl fmt::Display for TestIdealTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestIdealTag::PrincipalF => "PRINCIPAL_F",
            TestIdealTag::Maximal => "MAXIMAL",
            TestIdealTag::Unknown => "UNKNOWN",
        })
    }
}

/// Which case of the classification fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestIdealWitness {
    FptIsOne,
    FptIsDeltaSum,
    LargePrime,
    /// `fpt = sum 1/d_i < 1` but that sum has a power of `p` as
    /// denominator, where the maximal ideal can fail.
    DeltaSumPPowerDenominator,
    NoCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestIdealClass {
    pub tag: TestIdealTag,
    pub witness: TestIdealWitness,
}

/// The test ideal at the F-pure threshold, when a closed form applies.
///
/// `fpt < min{1, sum 1/d_i}` with `p <= max d_i` is left `Unknown`: the
/// maximal ideal is not always the answer there. So is `fpt = sum 1/d_i`
/// when that sum has a `p`-power denominator, which needs `p | d_i` for
/// some `i`: for `x^2 + y^6` over `F_3` the threshold is `2/3` and the test
/// ideal there is `(x, y^2)`.
pub fn classify_test_ideal_at_fpt(form: &DiagonalForm) -> Result<TestIdealClass> {
    let fpt = fpt_diagonal(form)?;
    let sum = form.delta_sum();
    let (tag, witness) = if fpt.is_one() {
        (TestIdealTag::PrincipalF, TestIdealWitness::FptIsOne)
    } else if fpt == sum {
        if basep::p_power_denominator(&sum, form.prime()).is_some() {
            (TestIdealTag::Unknown, TestIdealWitness::DeltaSumPPowerDenominator)
        } else {
            (TestIdealTag::Maximal, TestIdealWitness::FptIsDeltaSum)
        }
    } else if fpt < sum.clone().min(Rational::one()) && form.prime().get() > form.max_exponent() {
        (TestIdealTag::Maximal, TestIdealWitness::LargePrime)
    } else {
        (TestIdealTag::Unknown, TestIdealWitness::NoCase)
    };
    Ok(TestIdealClass { tag, witness })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum JumpRegime {
    /// `p = 1 mod d`; the threshold is 1.
    A1,
    /// `a >= 2`, `p < a(d-1)`: one extra jump below 1 is known.
    SmallP,
    /// `a >= 2`, `p > a(d-1)`: the threshold and 1 are all of them.
    BigP,
    /// `a >= 2`, `p < a(d-1)`, but the candidate jump is exactly 1.
    NoInfo,
}

impl fmt::Display for JumpRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JumpRegime::A1 => "A1",
            JumpRegime::SmallP => "SMALL_P",
            JumpRegime::BigP => "BIG_P",
            JumpRegime::NoInfo => "NO_INFO",
        })
    }
}

/// F-jumping numbers of a Fermat hypersurface in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpReport {
    #[serde(with = "crate::ratio_serde")]
    pub fpt: Rational,
    /// Jumps strictly above the threshold, increasing, all `<= 1`.
    #[serde(with = "crate::ratio_serde::vec")]
    pub extra_jumps: Vec<Rational>,
    /// True when these are provably all the jumps in `(0, 1]`.
    pub complete: bool,
    pub regime: JumpRegime,
    /// `((d+1) omega + ceil(2a/d)) / p` when `a >= 2` and `p < a(d-1)`.
    #[serde(with = "crate::ratio_serde::option")]
    pub candidate: Option<Rational>,
}

impl JumpReport {
    /// The threshold followed by the extra jumps.
    pub fn all_jumps(&self) -> Vec<Rational> {
        std::iter::once(self.fpt.clone())
            .chain(self.extra_jumps.iter().cloned())
            .collect()
    }
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// `(d+1) * omega + ceil(2a/d)`.
fn jump_candidate_numerator(d: u64, omega: u64, a: u64) -> u64 {
    (d + 1) * omega + ceil_div(2 * a, d)
}

pub fn fermat_jumps_unit_interval(d: u64, p: Prime) -> Result<JumpReport> {
    let (omega, a) = match FermatDecomposition::new(d, p)? {
        FermatDecomposition::Residue { omega, a } => (omega, a),
        FermatDecomposition::PowerRange { .. } => {
            return Err(Error::Unsupported(format!(
                "higher jumps need p > d (got d = {d}, p = {p})"
            )))
        }
    };
    let fpt = fpt_fermat(d, p)?;
    let pv = p.get();
    if a == 1 {
        return Ok(JumpReport {
            fpt,
            extra_jumps: Vec::new(),
            complete: true,
            regime: JumpRegime::A1,
            candidate: None,
        });
    }
    let threshold = a * (d - 1);
    assert_ne!(pv, threshold, "a(d-1) is composite when a >= 2, d >= 3");
    let bounds = bounds_check(d, p, omega, a)?;
    if pv < threshold {
        debug_assert_eq!(bounds.candidate_at_most_p, Some(true));
        let c = jump_candidate_numerator(d, omega, a);
        let candidate = Rational::new(c.into(), pv.into());
        let (extra_jumps, regime) = if c == pv {
            (vec![Rational::one()], JumpRegime::NoInfo)
        } else {
            (vec![candidate.clone(), Rational::one()], JumpRegime::SmallP)
        };
        Ok(JumpReport {
            fpt,
            extra_jumps,
            complete: false,
            regime,
            candidate: Some(candidate),
        })
    } else {
        debug_assert_eq!(bounds.big_prime_spread, Some(true));
        Ok(JumpReport {
            fpt,
            extra_jumps: vec![Rational::one()],
            complete: true,
            regime: JumpRegime::BigP,
            candidate: None,
        })
    }
}

/// `gamma - 1`; a number above 1 jumps exactly when its shift does.
pub fn shift_jump(gamma: &Rational) -> Result<Rational> {
    if *gamma <= Rational::one() {
        return Err(Error::Domain {
            value: gamma.to_string(),
            domain: "(1, inf)",
        });
    }
    Ok(gamma - Rational::one())
}

/// The three inequalities used for the Fermat jump computation.
/// Conditional ones are `None` when their hypothesis does not hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// `p < d(2 omega + ceil(2a/d) - 1) < 2p`
    pub spread: bool,
    /// `p < a(d-1)` implies `(d+1) omega + ceil(2a/d) <= p`
    pub candidate_at_most_p: Option<bool>,
    /// `p > a(d-1)` implies `p < d(omega + a - 1) < 2p`
    pub big_prime_spread: Option<bool>,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.spread && self.candidate_at_most_p != Some(false) && self.big_prime_spread != Some(false)
    }
}

pub fn bounds_check(d: u64, p: Prime, omega: u64, a: u64) -> Result<BoundsReport> {
    let pv = p.get();
    if a < 2 || a >= d || d * omega + a != pv {
        return Err(Error::Argument(format!(
            "need p = d*omega + a with 2 <= a < d (d = {d}, p = {p}, omega = {omega}, a = {a})"
        )));
    }
    let ceil2a = ceil_div(2 * a, d);
    let mid = d * (2 * omega + ceil2a - 1);
    let spread = pv < mid && mid < 2 * pv;
    let threshold = a * (d - 1);
    let candidate_at_most_p =
        (pv < threshold).then(|| jump_candidate_numerator(d, omega, a) <= pv);
    let big_prime_spread = (pv > threshold).then(|| {
        let v = d * (omega + a - 1);
        pv < v && v < 2 * pv
    });
    Ok(BoundsReport {
        spread,
        candidate_at_most_p,
        big_prime_spread,
    })
}

/// `(d-1) * digit(1/d, p, 2) >= p + 1`.
pub fn digits_trick_check(d: u64, p: Prime) -> Result<bool> {
    let pv = p.get();
    if !(pv > d && d > 2) || pv % d < 2 {
        return Err(Error::Hypothesis(format!(
            "need p > d > 2 and p mod d >= 2 (d = {d}, p = {p})"
        )));
    }
    let second = basep::digit(&Rational::new(1.into(), d.into()), p, 2)?;
    Ok((d - 1) * second > pv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn form(p: u64, exps: &[u64]) -> DiagonalForm {
        DiagonalForm::unit(pr(p), exps.to_vec()).unwrap()
    }

    #[test]
    fn form_validation() {
        assert!(DiagonalForm::unit(pr(5), vec![]).is_err());
        assert!(DiagonalForm::unit(pr(5), vec![1, 3]).is_err());
        assert!(DiagonalForm::new(pr(5), vec![2, 3], vec![1, 5]).is_err());
        assert!(DiagonalForm::new(pr(5), vec![2, 3], vec![1]).is_err());
        let f = DiagonalForm::new(pr(5), vec![2, 3], vec![6, 3]).unwrap();
        assert_eq!(f.coefficients(), &[1, 3]);
        assert_eq!(f.to_string(), "x1^2 + 3*x2^3 over F_5");
        assert_eq!(f.weights(), vec![3, 2]);
        assert_eq!(f.fermat_degree(), None);
        assert_eq!(DiagonalForm::fermat(3, pr(7)).unwrap().fermat_degree(), Some(3));
    }

    #[test]
    fn x2_plus_y3() {
        assert_eq!(fpt_diagonal(&form(3, &[2, 3])).unwrap(), q(2, 3));
        assert_eq!(fpt_diagonal(&form(7, &[2, 3])).unwrap(), q(5, 6));
        assert_eq!(fpt_diagonal(&form(5, &[2, 3])).unwrap(), q(4, 5));
        assert_eq!(fpt_diagonal(&form(2, &[2, 3])).unwrap(), q(1, 2));
    }

    #[test]
    fn single_variable() {
        for p in [2, 3, 5, 7, 13] {
            for d in 2..10 {
                assert_eq!(fpt_diagonal(&form(p, &[d])).unwrap(), q(1, d as i64));
            }
        }
    }

    #[test]
    fn fermat_thresholds() {
        assert_eq!(fpt_fermat(6, pr(11)).unwrap(), q(7, 11));
        assert_eq!(fpt_fermat(4, pr(2)).unwrap(), q(1, 4));
        assert_eq!(fpt_fermat(3, pr(7)).unwrap(), q(1, 1));
        assert_eq!(fpt_fermat(7, pr(7)).unwrap(), q(1, 7));
        assert_eq!(
            FermatDecomposition::new(6, pr(11)).unwrap(),
            FermatDecomposition::Residue { omega: 1, a: 5 }
        );
        assert_eq!(
            FermatDecomposition::new(9, pr(3)).unwrap(),
            FermatDecomposition::PowerRange { ell: 2 }
        );
    }

    #[test]
    fn classification() {
        let c = classify_test_ideal_at_fpt(&form(7, &[2, 3])).unwrap();
        assert_eq!((c.tag, c.witness), (TestIdealTag::Maximal, TestIdealWitness::FptIsDeltaSum));
        let c = classify_test_ideal_at_fpt(&form(7, &[3, 3, 3])).unwrap();
        assert_eq!(c.tag, TestIdealTag::PrincipalF);
        let c = classify_test_ideal_at_fpt(&form(5, &[2, 3])).unwrap();
        assert_eq!((c.tag, c.witness), (TestIdealTag::Maximal, TestIdealWitness::LargePrime));
        let c = classify_test_ideal_at_fpt(&form(3, &[2, 6])).unwrap();
        assert_eq!(c.tag, TestIdealTag::Unknown);
        assert_eq!(c.witness, TestIdealWitness::DeltaSumPPowerDenominator);
        let c = classify_test_ideal_at_fpt(&form(2, &[2, 3])).unwrap();
        assert_eq!(c.tag, TestIdealTag::Unknown);
    }

    #[test]
    fn jumps_d6_p11() {
        let r = fermat_jumps_unit_interval(6, pr(11)).unwrap();
        assert_eq!(r.fpt, q(7, 11));
        assert_eq!(r.extra_jumps, vec![q(9, 11), q(1, 1)]);
        assert_eq!(r.regime, JumpRegime::SmallP);
        assert!(!r.complete);
    }

    #[test]
    fn jumps_other_regimes() {
        let r = fermat_jumps_unit_interval(4, pr(7)).unwrap();
        assert_eq!(r.regime, JumpRegime::NoInfo);
        assert_eq!(r.candidate, Some(q(1, 1)));
        assert_eq!(r.extra_jumps, vec![q(1, 1)]);

        let r = fermat_jumps_unit_interval(3, pr(7)).unwrap();
        assert_eq!((r.regime, r.fpt.clone(), r.complete), (JumpRegime::A1, q(1, 1), true));
        assert!(r.extra_jumps.is_empty());

        let r = fermat_jumps_unit_interval(3, pr(5)).unwrap();
        assert_eq!(r.regime, JumpRegime::BigP);
        assert_eq!(r.all_jumps(), vec![q(4, 5), q(1, 1)]);

        assert!(matches!(
            fermat_jumps_unit_interval(6, pr(5)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn shifting() {
        assert_eq!(shift_jump(&q(18, 11)).unwrap(), q(7, 11));
        assert_eq!(shift_jump(&q(2, 1)).unwrap(), q(1, 1));
        assert_eq!(shift_jump(&q(20, 11)).unwrap(), q(9, 11));
        assert!(shift_jump(&q(1, 1)).is_err());
    }

    #[test]
    fn bounds() {
        let b = bounds_check(6, pr(11), 1, 5).unwrap();
        assert_eq!(b.candidate_at_most_p, Some(true));
        assert_eq!(jump_candidate_numerator(6, 1, 5), 9);
        assert!(b.all_hold());
        let b = bounds_check(4, pr(7), 1, 3).unwrap();
        assert_eq!(jump_candidate_numerator(4, 1, 3), 7);
        assert!(b.all_hold());
        let b = bounds_check(3, pr(5), 1, 2).unwrap();
        assert_eq!(b.big_prime_spread, Some(true));
        assert_eq!(b.candidate_at_most_p, None);
        assert!(bounds_check(3, pr(7), 2, 1).is_err());
    }

    #[test]
    fn digits_trick() {
        assert!(digits_trick_check(6, pr(11)).unwrap());
        assert!(digits_trick_check(3, pr(5)).unwrap());
        assert!(digits_trick_check(4, pr(7)).unwrap());
        assert!(digits_trick_check(3, pr(7)).is_err());
    }
}
