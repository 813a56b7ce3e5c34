use proptest::prelude::*;

use diagfpt_core::basep::{self, Prime};
use diagfpt_core::frobenius::{self, Limits};
use diagfpt_core::invariants::{self, DiagonalForm, JumpRegime};
use diagfpt_core::Rational;

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(&PRIMES[..]).prop_map(|p| Prime::new(p).unwrap())
}

fn small_prime() -> impl Strategy<Value = Prime> {
    prop::sample::select(&PRIMES[..4]).prop_map(|p| Prime::new(p).unwrap())
}

/// `num/den` in `(0, 1]`.
fn unit_rational() -> impl Strategy<Value = Rational> {
    (1u64..400).prop_flat_map(|den| (1..=den).prop_map(move |num| Rational::new(num.into(), den.into())))
}

fn exponents(max_len: usize, max_d: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(2..=max_d, 1..=max_len)
}

fn q(n: u64, d: u64) -> Rational {
    Rational::new(n.into(), d.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn truncation_rounds_up_to_grid(lambda in unit_rational(), p in prime(), e in 1u32..8, m in 0u64..400) {
        let pe = p.get().pow(e);
        let t = basep::truncate(&lambda, p, e).unwrap();
        let alpha = q(m % (pe + 1), pe);
        if lambda > alpha {
            prop_assert!(t >= alpha);
        }
        prop_assert!(t < lambda);
    }

    #[test]
    fn expansion_matches_ceiling_digits(lambda in unit_rational(), p in prime()) {
        let x = basep::expansion(&lambda, p).unwrap();
        prop_assert_eq!(x.value(), lambda.clone());
        let horizon = x.preperiod.len() + 3 * x.period.len();
        for e in 1..=horizon as u32 {
            prop_assert_eq!(x.digit(e as u64), basep::digit(&lambda, p, e).unwrap());
        }
    }

    #[test]
    fn fpt_range_and_carry_free_sum(exps in exponents(4, 12), p in prime()) {
        let form = DiagonalForm::unit(p, exps).unwrap();
        let detail = invariants::fpt_diagonal_detailed(&form).unwrap();
        let sum = form.delta_sum();
        prop_assert!(detail.fpt > q(0, 1));
        prop_assert!(detail.fpt <= sum.clone().min(q(1, 1)));
        prop_assert_eq!(detail.fpt == sum, detail.prefix.is_infinite());
    }

    #[test]
    fn fpt_ignores_coefficients(exps in exponents(4, 12), p in prime(), seed in any::<u64>()) {
        let coeffs: Vec<u64> = (0..exps.len() as u64).map(|i| 1 + (seed >> (8 * i)) % (p.get() - 1)).collect();
        let plain = DiagonalForm::unit(p, exps.clone()).unwrap();
        let twisted = DiagonalForm::new(p, exps, coeffs).unwrap();
        prop_assert_eq!(invariants::fpt_diagonal(&plain).unwrap(), invariants::fpt_diagonal(&twisted).unwrap());
    }

    #[test]
    fn sandwich_and_flatness(exps in exponents(3, 9), p in small_prime()) {
        let lim = Limits::default();
        let form = DiagonalForm::unit(p, exps).unwrap();
        let fpt = invariants::fpt_diagonal(&form).unwrap();
        let mut prev = 0;
        for e in 1..=3 {
            let (lo, hi) = frobenius::fpt_bracket(&form, e, &lim).unwrap();
            prop_assert!(lo < fpt && fpt <= hi);
            let nu = frobenius::nu(&form, e, &lim).unwrap();
            prop_assert!(nu >= p.get() * prev);
            prev = nu;
        }
    }

    #[test]
    fn graded_membership_matches_full_expansion(
        exps in exponents(3, 6),
        p in small_prime(),
        e in 1u32..=2,
        n in 0u64..60,
        seed in any::<u64>(),
    ) {
        let lim = Limits::default();
        let coeffs: Vec<u64> = (0..exps.len() as u64).map(|i| 1 + (seed >> (8 * i)) % (p.get() - 1)).collect();
        let form = DiagonalForm::new(p, exps.clone(), coeffs).unwrap();
        prop_assume!(frobenius::carry_free_count(n, exps.len(), p) < 20_000);
        let ideal = frobenius::pideal_generators(&form, n, e, &lim).unwrap();
        let vm = frobenius::variable_membership(&form, n, e, &lim).unwrap();
        prop_assert_eq!(ideal.is_unit(&lim).unwrap(), vm.unit);
        for i in 0..exps.len() {
            let x = frobenius::PolyFp::variable(p, exps.len(), i);
            prop_assert_eq!(ideal.contains(&x, &lim).unwrap(), vm.variables[i]);
        }
        // the coefficients never change which variables are in
        let plain = DiagonalForm::unit(p, exps).unwrap();
        prop_assert_eq!(frobenius::variable_membership(&plain, n, e, &lim).unwrap(), vm);
    }

    #[test]
    fn stabilization_at_p_power_denominators(exps in exponents(2, 6), p in small_prime(), m in 1u64..25) {
        let lim = Limits::default();
        let form = DiagonalForm::unit(p, exps).unwrap();
        let lambda = q(m, p.get());
        let a = frobenius::test_ideal(&form, &lambda, 1, &lim).unwrap();
        let b = frobenius::test_ideal(&form, &lambda, 2, &lim).unwrap();
        prop_assert!(a.ideal.equals(&b.ideal, &lim).unwrap());
    }

    #[test]
    fn right_continuity_at_threshold(exps in exponents(3, 7), p in small_prime()) {
        let lim = Limits::default();
        let form = DiagonalForm::unit(p, exps).unwrap();
        let fpt = invariants::fpt_diagonal(&form).unwrap();
        let Some(m) = basep::p_power_denominator(&fpt, p) else { return Ok(()) };
        prop_assume!(m <= 2);
        let e = m.max(1);
        let at = frobenius::test_ideal_variables(&form, &fpt, e, &lim).unwrap();
        prop_assert!(!at.unit);
        let below = fpt - q(1, p.get().pow(e));
        if below > q(0, 1) {
            let under = frobenius::test_ideal_variables(&form, &below, e, &lim).unwrap();
            prop_assert!(under.unit);
        }
    }
}

#[test]
fn fermat_agrees_with_diagonal() {
    for d in 2..=9u64 {
        for p in (2..=100u64).filter(|&p| basep::is_prime(p)) {
            let p = Prime::new(p).unwrap();
            let form = DiagonalForm::fermat(d, p).unwrap();
            assert_eq!(
                invariants::fpt_fermat(d, p).unwrap(),
                invariants::fpt_diagonal(&form).unwrap(),
                "d={d} p={p}"
            );
        }
    }
}

#[test]
fn jump_lists_are_ordered_and_large_primes_add_nothing() {
    for d in 2..=9u64 {
        for p in (d + 1..=200).filter(|&p| basep::is_prime(p)) {
            let p = Prime::new(p).unwrap();
            let r = invariants::fermat_jumps_unit_interval(d, p).unwrap();
            let mut last = r.fpt.clone();
            for j in &r.extra_jumps {
                assert!(*j > last && *j <= q(1, 1), "d={d} p={p}");
                last = j.clone();
            }
            if p.get() > (d - 1) * (d - 1) {
                assert!(matches!(r.regime, JumpRegime::A1 | JumpRegime::BigP), "d={d} p={p}");
            }
        }
    }
}
