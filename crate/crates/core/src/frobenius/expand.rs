//! Expansion of `f^N` for diagonal `f` and the coefficient ideals
//! `I_e(f^N)` built from it.
//!
//! `f^N = sum_{|k| = N} binom(N; k) u^k x^{Dk}`. Distinct `k` give distinct
//! monomials, so a term survives exactly when the multinomial is nonzero
//! mod `p`, i.e. when the `k_i` add without carrying. Those `k` are
//! enumerated digit by digit: each `k_i` is a digit-wise sub-vector of
//! what is left of `N`.
//!
//! Writing `Dk = p^e q + r` with `r` in `[0, p^e)^n`, the basis coefficient
//! of `x^r` collects `c_k x^q` over all `k` sharing `r`. With weights
//! `w_i = lcm(d) / d_i` every such `x^q` has the same weighted degree
//! `(lcm(d) N - w.r) / p^e`, so the coefficient ideal is homogeneous and
//! low-degree questions only need low-degree generators.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::ControlFlow;

use super::ideal::{check_columns, check_rows, Echelon, IdealFp, Limits};
use super::poly::{monomials_of_degree, Monomial, PolyFp};
use crate::basep::{self, Prime};
use crate::error::{Error, Result};
use crate::invariants::DiagonalForm;

pub(crate) fn prime_power(p: Prime, e: u32) -> Result<u64> {
    p.pow_u64(e).ok_or(Error::Budget {
        what: "p^e",
        needed: u128::MAX,
        limit: u64::MAX as u128,
    })
}

fn pow_mod(base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut b = base % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        exp >>= 1;
    }
    acc % p
}

/// Coefficient of `x^{Dk}` in `f^{|k|}`.
pub fn term_coefficient(form: &DiagonalForm, k: &[u64]) -> u64 {
    let p = form.prime();
    let pv = p.get();
    let mut c = basep::multinomial_mod_p(k, p);
    for (&u, &kj) in form.coefficients().iter().zip(k) {
        c = ((c as u128 * pow_mod(u, kj, pv) as u128) % pv as u128) as u64;
    }
    c
}

/// All `s` whose base-`p` digits are bounded by those of `r`, ascending.
pub(crate) fn submasks(r: u64, p: u64) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut rest = r;
    let mut place = 1u64;
    while rest > 0 {
        let digit = rest % p;
        let mut next = Vec::with_capacity(out.len() * (digit as usize + 1));
        for &s in &out {
            for a in 0..=digit {
                next.push(s + a * place);
            }
        }
        out = next;
        rest /= p;
        place = place.saturating_mul(p);
    }
    out.sort_unstable();
    out
}

/// Number of carry-free `k` in `n` parts with `|k| = N`.
pub fn carry_free_count(n_power: u64, nvars: usize, p: Prime) -> u128 {
    fn binom(n: u128, k: u128) -> u128 {
        (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
    }
    basep::int_digits(n_power, p)
        .into_iter()
        .map(|t| binom(t as u128 + nvars as u128 - 1, nvars as u128 - 1))
        .fold(1u128, u128::saturating_mul)
}

/// Depth-first walk over carry-free `k` with `|k| = N`, optionally only
/// those whose quotient `q = floor(Dk / p^e)` has weighted degree at most
/// `cap`. Variables are visited in `order`; the first one may be walked
/// from its largest admissible value down.
struct KWalk<'a> {
    form: &'a DiagonalForm,
    pe: u64,
    weights: Vec<u64>,
    cap: Option<u64>,
    order: Vec<usize>,
    lead_descending: bool,
    nodes: u64,
    limits: &'a Limits,
    dead: HashSet<(usize, u64, u64)>,
}

impl<'a> KWalk<'a> {
    fn new(form: &'a DiagonalForm, e: u32, cap: Option<u64>, limits: &'a Limits) -> Result<Self> {
        Ok(KWalk {
            form,
            pe: prime_power(form.prime(), e)?,
            weights: form.weights(),
            cap,
            order: (0..form.nvars()).collect(),
            lead_descending: false,
            nodes: 0,
            limits,
            dead: HashSet::new(),
        })
    }

    /// Walk variable `lead` first, largest values first.
    fn led_by(mut self, lead: usize) -> Self {
        self.order = std::iter::once(lead)
            .chain((0..self.form.nvars()).filter(|&j| j != lead))
            .collect();
        self.lead_descending = true;
        self
    }

    fn cost(&self, j: usize, kj: u64) -> u64 {
        self.weights[j] * (self.form.exponents()[j] * kj / self.pe)
    }

    /// Largest `k_j` whose cost fits in `budget`.
    fn max_k(&self, j: usize, budget: u64) -> u64 {
        let q = budget / self.weights[j];
        (q + 1).saturating_mul(self.pe).saturating_sub(1) / self.form.exponents()[j]
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limits.max_terms {
            Err(Error::Budget {
                what: "expansion search nodes",
                needed: self.nodes as u128,
                limit: self.limits.max_terms as u128,
            })
        } else {
            Ok(())
        }
    }

    /// Returns true if the visitor stopped the walk early.
    fn run<F>(&mut self, n_power: u64, visit: &mut F) -> Result<bool>
    where
        F: FnMut(&[u64], u64) -> Result<ControlFlow<()>>,
    {
        let mut k = vec![0; self.form.nvars()];
        let budget = self.cap.unwrap_or(u64::MAX);
        let (flow, _) = self.step(0, n_power, budget, 0, &mut k, visit)?;
        Ok(flow.is_break())
    }

    /// Returns the control flow and whether any leaf was reached.
    fn step<F>(
        &mut self,
        pos: usize,
        rem: u64,
        budget: u64,
        spent: u64,
        k: &mut Vec<u64>,
        visit: &mut F,
    ) -> Result<(ControlFlow<()>, bool)>
    where
        F: FnMut(&[u64], u64) -> Result<ControlFlow<()>>,
    {
        self.tick()?;
        let n = k.len();
        let p = self.form.prime().get();
        let j = self.order[pos];
        if pos + 1 == n {
            let c = self.cost(j, rem);
            if c > budget {
                return Ok((ControlFlow::Continue(()), false));
            }
            k[j] = rem;
            return Ok((visit(k, spent + c)?, true));
        }
        if self.cap.is_some() {
            if self.dead.contains(&(pos, rem, budget)) {
                return Ok((ControlFlow::Continue(()), false));
            }
            let room = self.order[pos..]
                .iter()
                .fold(0u64, |acc, &l| acc.saturating_add(self.max_k(l, budget)));
            if rem > room {
                return Ok((ControlFlow::Continue(()), false));
            }
        }
        let mut choices = submasks(rem, p);
        let limit = choices.partition_point(|&s| self.cost(j, s) <= budget);
        choices.truncate(limit);
        if pos == 0 && self.lead_descending {
            choices.reverse();
        }
        let mut found = false;
        for s in choices {
            let c = self.cost(j, s);
            k[j] = s;
            let (flow, hit) = self.step(pos + 1, rem - s, budget - c, spent + c, k, visit)?;
            found |= hit;
            if flow.is_break() {
                return Ok((flow, found));
            }
        }
        k[j] = 0;
        if self.cap.is_some() && !found {
            self.dead.insert((pos, rem, budget));
        }
        Ok((ControlFlow::Continue(()), found))
    }
}

/// Every term `(k, coefficient)` of `f^N`, coefficients nonzero.
pub fn power_terms(form: &DiagonalForm, n_power: u64, limits: &Limits) -> Result<Vec<(Vec<u64>, u64)>> {
    check_term_count(form, n_power, limits)?;
    let mut out = Vec::new();
    let mut walk = KWalk::new(form, 0, None, limits)?;
    walk.run(n_power, &mut |k, _| {
        out.push((k.to_vec(), term_coefficient(form, k)));
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(out)
}

fn check_term_count(form: &DiagonalForm, n_power: u64, limits: &Limits) -> Result<()> {
    let count = carry_free_count(n_power, form.nvars(), form.prime());
    if count > limits.max_terms as u128 {
        Err(Error::Budget {
            what: "terms of f^N",
            needed: count,
            limit: limits.max_terms as u128,
        })
    } else {
        Ok(())
    }
}

/// Generators of `I_e(f^N)`, one per basis monomial that occurs.
pub fn pideal_generators(form: &DiagonalForm, n_power: u64, e: u32, limits: &Limits) -> Result<IdealFp> {
    check_term_count(form, n_power, limits)?;
    coefficient_generators(form, n_power, e, None, limits)
}

/// The generators of `I_e(f^N)` of weighted degree at most `max_degree`.
/// Since the ideal is graded, this decides membership of anything of
/// weighted degree at most `max_degree`.
pub fn pideal_generators_graded(
    form: &DiagonalForm,
    n_power: u64,
    e: u32,
    max_degree: u64,
    limits: &Limits,
) -> Result<IdealFp> {
    coefficient_generators(form, n_power, e, Some(max_degree), limits)
}

fn coefficient_generators(
    form: &DiagonalForm,
    n_power: u64,
    e: u32,
    cap: Option<u64>,
    limits: &Limits,
) -> Result<IdealFp> {
    let n = form.nvars();
    let p = form.prime();
    let mut groups: BTreeMap<Monomial, PolyFp> = BTreeMap::new();
    let mut walk = KWalk::new(form, e, cap, limits)?;
    let pe = walk.pe;
    walk.run(n_power, &mut |k, _| {
        let (q, r) = split_exponents(form, k, pe);
        groups
            .entry(r)
            .or_insert_with(|| PolyFp::zero(p, n))
            .add_term(q, term_coefficient(form, k));
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(IdealFp::with_weights(p, form.weights(), groups.into_values().collect()))
}

/// `Dk = p^e q + r`.
fn split_exponents(form: &DiagonalForm, k: &[u64], pe: u64) -> (Monomial, Monomial) {
    form.exponents()
        .iter()
        .zip(k)
        .map(|(d, kj)| (d * kj / pe, d * kj % pe))
        .unzip()
}

/// `Coeff_{x^r}(f^N; e)`: the polynomial `c` with `c^{p^e} x^r` the part
/// of `f^N` supported on `x^r R^{p^e}`. Over `F_p` the `p^e`-th root of a
/// scalar is the scalar itself.
pub fn basis_coefficient(
    form: &DiagonalForm,
    n_power: u64,
    e: u32,
    r: &[u64],
    limits: &Limits,
) -> Result<PolyFp> {
    let p = form.prime();
    let n = form.nvars();
    let pe = prime_power(p, e)?;
    if r.len() != n || r.iter().any(|&x| x >= pe) {
        return Err(Error::Argument(format!("{r:?} is not a basis monomial at level {e}")));
    }
    let weights = form.weights();
    let total = form.weighted_degree() as u128 * n_power as u128;
    let rdeg = PolyFp::weighted_degree_of(r, &weights) as u128;
    let mut out = PolyFp::zero(p, n);
    if rdeg > total || !(total - rdeg).is_multiple_of(pe as u128) {
        return Ok(out);
    }
    let t = ((total - rdeg) / pe as u128) as u64;

    let mut nodes = 0u64;
    let mut q = vec![0u64; n];
    let mut k = vec![0u64; n];
    #[allow(clippy::too_many_arguments)]
    fn go(
        form: &DiagonalForm,
        weights: &[u64],
        pe: u64,
        r: &[u64],
        j: usize,
        left: u64,
        q: &mut Vec<u64>,
        k: &mut Vec<u64>,
        out: &mut PolyFp,
        nodes: &mut u64,
        limits: &Limits,
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > limits.max_terms {
            return Err(Error::Budget {
                what: "basis coefficient search nodes",
                needed: *nodes as u128,
                limit: limits.max_terms as u128,
            });
        }
        let n = q.len();
        let d = form.exponents()[j];
        let w = weights[j];
        let candidates: Vec<u64> = if j + 1 == n {
            if left.is_multiple_of(w) {
                vec![left / w]
            } else {
                vec![]
            }
        } else {
            (0..=left / w).collect()
        };
        for qj in candidates {
            let v = pe * qj + r[j];
            if !v.is_multiple_of(d) {
                continue;
            }
            q[j] = qj;
            k[j] = v / d;
            if j + 1 == n {
                out.add_term(q.clone(), term_coefficient(form, k));
            } else {
                go(form, weights, pe, r, j + 1, left - qj * w, q, k, out, nodes, limits)?;
            }
        }
        q[j] = 0;
        k[j] = 0;
        Ok(())
    }
    go(form, &weights, pe, r, 0, t, &mut q, &mut k, &mut out, &mut nodes, limits)?;
    Ok(out)
}

/// Which variables (and whether 1) lie in `I_e(f^N)`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct VariableMembership {
    pub unit: bool,
    pub variables: Vec<bool>,
}

impl VariableMembership {
    /// `I_e(f^N) = (x_1, ..., x_n)`.
    pub fn is_maximal(&self) -> bool {
        !self.unit && self.variables.iter().all(|&b| b)
    }

    pub fn has_no_variable(&self) -> bool {
        self.variables.iter().all(|&b| !b)
    }
}

/// Decides `1 in I_e(f^N)` and `x_i in I_e(f^N)` for every `i` by linear
/// algebra on the low-degree generators only.
///
/// For each undecided `x_i`, carry-free `k` whose quotient has weighted
/// degree at most `w_i` are streamed, largest `k_i` first. Each new basis
/// monomial `x^r` met this way contributes its complete coefficient
/// `Coeff_{x^r}(f^N; e)` (recomputed from scratch, so any gathering of
/// several `k` onto one `r` is accounted for) to a row-echelon span per
/// target degree. A walk that runs to the end settles every variable of
/// weight at most `w_i`.
pub fn variable_membership(
    form: &DiagonalForm,
    n_power: u64,
    e: u32,
    limits: &Limits,
) -> Result<VariableMembership> {
    let n = form.nvars();
    let p = form.prime();
    if min_generator_degree(form, n_power, e, limits)? == 0 {
        return Ok(VariableMembership {
            unit: true,
            variables: vec![true; n],
        });
    }
    let weights = form.weights();
    let mut target_degrees: Vec<u64> = weights.clone();
    target_degrees.sort_unstable();
    target_degrees.dedup();

    let mut spans: HashMap<u64, (Echelon, usize)> = HashMap::new();
    for &s in &target_degrees {
        let width = monomials_of_degree(&weights, s).len();
        check_columns(width as u64, limits)?;
        spans.insert(s, (Echelon::new(), width));
    }
    let mut members = vec![false; n];
    let mut settled = vec![false; n];
    let mut seen: HashSet<Monomial> = HashSet::new();
    let mut rows = 0u64;
    let pe = prime_power(p, e)?;

    for i in 0..n {
        if settled[i] {
            continue;
        }
        let cap = weights[i];
        let mut walk = KWalk::new(form, e, Some(cap), limits)?.led_by(i);
        let stopped = walk.run(n_power, &mut |k, degree| {
            let (_, r) = split_exponents(form, k, pe);
            if !seen.insert(r.clone()) {
                return Ok(ControlFlow::Continue(()));
            }
            let g = basis_coefficient(form, n_power, e, &r, limits)?;
            debug_assert_eq!(g.homogeneous_degree(&weights), Some(degree));
            for &s in target_degrees.iter().filter(|&&s| s >= degree) {
                let (span, width) = spans.get_mut(&s).unwrap();
                for a in monomials_of_degree(&weights, s - degree) {
                    if span.rank() == *width {
                        break;
                    }
                    rows += 1;
                    check_rows(rows, limits)?;
                    let mut v = PolyFp::zero(p, n);
                    v.add_scaled_shifted(&g, 1, &a);
                    span.insert(v);
                }
            }
            for j in 0..n {
                if !members[j] && spans[&weights[j]].0.contains(&PolyFp::variable(p, n, j)) {
                    members[j] = true;
                    settled[j] = true;
                }
            }
            Ok(if settled[i] {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            })
        })?;
        if !stopped {
            for j in 0..n {
                if weights[j] <= cap {
                    settled[j] = true;
                }
            }
        }
    }
    Ok(VariableMembership {
        unit: false,
        variables: members,
    })
}

/// Smallest weighted degree of a generator of `I_e(f^N)`; zero exactly
/// when the ideal is the unit ideal.
pub fn min_generator_degree(form: &DiagonalForm, n_power: u64, e: u32, limits: &Limits) -> Result<u64> {
    struct Memo<'a> {
        form: &'a DiagonalForm,
        pe: u64,
        weights: Vec<u64>,
        table: HashMap<(usize, u64), u64>,
        limits: &'a Limits,
    }
    impl Memo<'_> {
        fn cost(&self, j: usize, kj: u64) -> u64 {
            self.weights[j] * (self.form.exponents()[j] * kj / self.pe)
        }
        fn best(&mut self, j: usize, rem: u64) -> Result<u64> {
            if j + 1 == self.weights.len() {
                return Ok(self.cost(j, rem));
            }
            if let Some(&v) = self.table.get(&(j, rem)) {
                return Ok(v);
            }
            if self.table.len() as u64 > self.limits.max_terms {
                return Err(Error::Budget {
                    what: "min-degree table",
                    needed: self.table.len() as u128,
                    limit: self.limits.max_terms as u128,
                });
            }
            let mut best = u64::MAX;
            for s in submasks(rem, self.form.prime().get()) {
                let c = self.cost(j, s);
                if c >= best {
                    break;
                }
                best = best.min(c + self.best(j + 1, rem - s)?);
            }
            self.table.insert((j, rem), best);
            Ok(best)
        }
    }
    let mut memo = Memo {
        form,
        pe: prime_power(form.prime(), e)?,
        weights: form.weights(),
        table: HashMap::new(),
        limits,
    };
    memo.best(0, n_power)
}

/// For the degree-`d` Fermat form: is there a carry-free `k` with
/// `|k| = N`, `p^e <= d k_i < 2 p^e` and `d k_j < p^e` for `j != i`?
/// Such a `k` makes `x_i` (up to a unit) a generator of `I_e(f^N)`.
///
/// `i` is 0-based.
pub fn nogathering_member(d: u64, p: Prime, e: u32, n_power: u64, i: usize, limits: &Limits) -> Result<bool> {
    if p.is_power(d) {
        return Err(Error::Hypothesis(format!("{d} is a power of {p}")));
    }
    if i as u64 >= d {
        return Err(Error::Argument(format!("variable index {i} out of range for d = {d}")));
    }
    let pe = prime_power(p, e)?;
    let n = d as usize;
    let bounds: Vec<(u64, u64)> = (0..n)
        .map(|j| {
            if j == i {
                (pe.div_ceil(d), (2 * pe - 1) / d)
            } else {
                (0, (pe - 1) / d)
            }
        })
        .collect();
    // variable i first; the others are interchangeable
    let mut order: Vec<usize> = vec![i];
    order.extend((0..n).filter(|&j| j != i));
    let suffix_room: Vec<u64> = (0..=n)
        .map(|s| order[s..].iter().map(|&j| bounds[j].1).sum())
        .collect();

    #[allow(clippy::too_many_arguments)]
    fn feasible(
        s: usize,
        rem: u64,
        order: &[usize],
        bounds: &[(u64, u64)],
        room: &[u64],
        p: u64,
        table: &mut HashMap<(usize, u64), bool>,
        limits: &Limits,
    ) -> Result<bool> {
        if rem > room[s] {
            return Ok(false);
        }
        let (lo, hi) = bounds[order[s]];
        if s + 1 == order.len() {
            return Ok(lo <= rem && rem <= hi);
        }
        if let Some(&v) = table.get(&(s, rem)) {
            return Ok(v);
        }
        if table.len() as u64 > limits.max_terms {
            return Err(Error::Budget {
                what: "no-gathering table",
                needed: table.len() as u128,
                limit: limits.max_terms as u128,
            });
        }
        let mut ok = false;
        for kj in submasks(rem, p) {
            if kj > hi {
                break;
            }
            if kj >= lo && feasible(s + 1, rem - kj, order, bounds, room, p, table, limits)? {
                ok = true;
                break;
            }
        }
        table.insert((s, rem), ok);
        Ok(ok)
    }
    let mut table = HashMap::new();
    feasible(0, n_power, &order, &bounds, &suffix_room, p.get(), &mut table, limits)
}

/// Checks the sufficient condition for `x_i in I_e(f^{p^e |trunc_e(delta)| + 1})`:
/// the level-`e` digits of the `1/d_j` sum to at most `p - 2`, and the
/// entries `p^e trunc_e(1/d_j)` add without carrying.
///
/// `Ok(false)` means the condition fails, which says nothing about
/// membership. Requires `d_i < p^e` with `d_i` not a power of `p`.
pub fn projection_ideal_member(form: &DiagonalForm, e: u32, i: usize) -> Result<bool> {
    let p = form.prime();
    let d = *form
        .exponents()
        .get(i)
        .ok_or_else(|| Error::Argument(format!("variable index {i} out of range")))?;
    let pe = prime_power(p, e)?;
    if d >= pe {
        return Err(Error::Hypothesis(format!("d_{} = {d} is not below p^e = {pe}", i + 1)));
    }
    if p.is_power(d) {
        return Err(Error::Hypothesis(format!("d_{} = {d} is a power of {p}", i + 1)));
    }
    let mut digit_sum = 0u64;
    let mut k = Vec::with_capacity(form.nvars());
    for &dj in form.exponents() {
        let delta = crate::Rational::new(1.into(), dj.into());
        digit_sum += basep::digit(&delta, p, e)?;
        // p^e trunc_e(1/d_j) = ceil(p^e / d_j) - 1
        k.push(pe.div_ceil(dj) - 1);
    }
    Ok(digit_sum + 2 <= p.get() && basep::multinomial_nonzero_mod_p(&k, p))
}

/// `p^e |trunc_e(1/d)| + 1`, the power used in [`projection_ideal_member`].
pub fn projection_power(form: &DiagonalForm, e: u32) -> Result<u64> {
    let pe = prime_power(form.prime(), e)?;
    Ok(form.exponents().iter().map(|&d| pe.div_ceil(d) - 1).sum::<u64>() + 1)
}
