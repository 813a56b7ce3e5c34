use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::basep::{inv_mod, Prime};

/// Exponent vector of a monomial.
pub type Monomial = Vec<u64>;

/// Sparse polynomial over the prime field `F_p`. No zero coefficients are
/// stored; iteration order is lexicographic in the exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyFp {
    prime: Prime,
    nvars: usize,
    #[serde(with = "pairs")]
    terms: BTreeMap<Monomial, u64>,
}

mod pairs {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &BTreeMap<Monomial, u64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(t.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Monomial, u64>, D::Error> {
        let v: Vec<(Monomial, u64)> = Vec::deserialize(d)?;
        Ok(v.into_iter().filter(|(_, c)| *c != 0).collect())
    }
}

impl PolyFp {
    pub fn zero(prime: Prime, nvars: usize) -> Self {
        PolyFp {
            prime,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(prime: Prime, nvars: usize, c: u64) -> Self {
        Self::monomial(prime, vec![0; nvars], c)
    }

    pub fn one(prime: Prime, nvars: usize) -> Self {
        Self::constant(prime, nvars, 1)
    }

    pub fn monomial(prime: Prime, exponents: Monomial, c: u64) -> Self {
        let mut out = Self::zero(prime, exponents.len());
        out.add_term(exponents, c);
        out
    }

    /// The `i`-th variable (0-based).
    pub fn variable(prime: Prime, nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Self::monomial(prime, exps, 1)
    }

    pub fn from_terms(prime: Prime, nvars: usize, terms: impl IntoIterator<Item = (Monomial, u64)>) -> Self {
        let mut out = Self::zero(prime, nvars);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &[u64]) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Largest monomial in lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, u64)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    pub fn add_term(&mut self, m: Monomial, c: u64) {
        debug_assert_eq!(m.len(), self.nvars);
        let c = c % self.prime.get();
        if c != 0 {
            self.accumulate(m, c);
        }
    }

    fn accumulate(&mut self, key: Monomial, add: u64) {
        let p = self.prime.get();
        match self.terms.entry(key) {
            Entry::Occupied(mut o) => {
                let s = (*o.get() + add) % p;
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(add);
            }
        }
    }

    /// `self += c * x^shift * other`
    pub fn add_scaled_shifted(&mut self, other: &PolyFp, c: u64, shift: &[u64]) {
        let p = self.prime.get();
        let c = c % p;
        if c == 0 {
            return;
        }
        for (m, &v) in &other.terms {
            let key: Monomial = m.iter().zip(shift).map(|(a, b)| a + b).collect();
            let add = ((v as u128 * c as u128) % p as u128) as u64;
            self.accumulate(key, add);
        }
    }

    pub fn add(&self, other: &PolyFp) -> PolyFp {
        let mut out = self.clone();
        out.add_scaled_shifted(other, 1, &vec![0; self.nvars]);
        out
    }

    pub fn sub(&self, other: &PolyFp) -> PolyFp {
        let mut out = self.clone();
        out.add_scaled_shifted(other, self.prime.get() - 1, &vec![0; self.nvars]);
        out
    }

    pub fn scale(&self, c: u64) -> PolyFp {
        let mut out = Self::zero(self.prime, self.nvars);
        out.add_scaled_shifted(self, c, &vec![0; self.nvars]);
        out
    }

    pub fn mul(&self, other: &PolyFp) -> PolyFp {
        let mut out = Self::zero(self.prime, self.nvars);
        for (m, &c) in &self.terms {
            out.add_scaled_shifted(other, c, m);
        }
        out
    }

    pub fn pow(&self, mut n: u64) -> PolyFp {
        let mut acc = Self::one(self.prime, self.nvars);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self^(p^e)`: over `F_p` this just scales every exponent by `p^e`.
    pub fn frobenius_power(&self, e: u32) -> PolyFp {
        let pe = self.prime.get().pow(e);
        Self::from_terms(
            self.prime,
            self.nvars,
            self.terms
                .iter()
                .map(|(m, &c)| (m.iter().map(|x| x * pe).collect(), c)),
        )
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> PolyFp {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(inv_mod(c, self.prime)),
        }
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn weighted_degree_of(m: &[u64], weights: &[u64]) -> u64 {
        m.iter().zip(weights).map(|(a, w)| a * w).sum()
    }

    /// The common weighted degree of all terms, if there is one.
    pub fn homogeneous_degree(&self, weights: &[u64]) -> Option<u64> {
        let mut degrees = self.terms.keys().map(|m| Self::weighted_degree_of(m, weights));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// Splits into weighted-homogeneous pieces keyed by degree.
    pub fn homogeneous_components(&self, weights: &[u64]) -> BTreeMap<u64, PolyFp> {
        let mut out: BTreeMap<u64, PolyFp> = BTreeMap::new();
        for (m, &c) in &self.terms {
            out.entry(Self::weighted_degree_of(m, weights))
                .or_insert_with(|| Self::zero(self.prime, self.nvars))
                .add_term(m.clone(), c);
        }
        out
    }

    /// Sorted `(exponents, coefficient)` pairs.
    pub fn to_pairs(&self) -> Vec<(Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m.clone(), c)).collect()
    }
}

impl fmt::Display for PolyFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(j, &a)| if a == 1 { format!("x{}", j + 1) } else { format!("x{}^{a}", j + 1) })
                .collect();
            match (vars.is_empty(), *c) {
                (true, c) => write!(f, "{c}")?,
                (false, 1) => write!(f, "{}", vars.join("*"))?,
                (false, c) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Monomials in `n` variables of weighted degree exactly `degree`.
pub fn monomials_of_degree(weights: &[u64], degree: u64) -> Vec<Monomial> {
    fn go(weights: &[u64], idx: usize, left: u64, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if idx + 1 == weights.len() {
            if left.is_multiple_of(weights[idx]) {
                cur[idx] = left / weights[idx];
                out.push(cur.clone());
                cur[idx] = 0;
            }
            return;
        }
        let w = weights[idx];
        for a in 0..=left / w {
            cur[idx] = a;
            go(weights, idx + 1, left - a * w, cur, out);
        }
        cur[idx] = 0;
    }
    let mut out = Vec::new();
    if weights.is_empty() {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0; weights.len()];
    go(weights, 0, degree, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn arithmetic_mod_p() {
        let p = pr(3);
        let x = PolyFp::variable(p, 2, 0);
        let y = PolyFp::variable(p, 2, 1);
        let s = x.add(&y);
        // (x + y)^3 = x^3 + y^3 in characteristic 3
        assert_eq!(s.pow(3), x.pow(3).add(&y.pow(3)));
        assert_eq!(s.pow(3), s.frobenius_power(1));
        assert!(s.sub(&s).is_zero());
        assert_eq!(x.scale(3), PolyFp::zero(p, 2));
        assert_eq!(s.pow(2).to_string(), "x1^2 + 2*x1*x2 + x2^2");
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = pr(5);
        let mut f = PolyFp::monomial(p, vec![1, 0], 2);
        f.add_term(vec![0, 1], 1);
        f.add_term(vec![1, 0], 3);
        assert_eq!(f.len(), 1);
        assert_eq!(f.coefficient(&[0, 1]), 1);
    }

    #[test]
    fn grading() {
        let p = pr(7);
        let f = PolyFp::from_terms(p, 2, [(vec![2, 0], 1), (vec![0, 3], 1)]);
        assert_eq!(f.homogeneous_degree(&[3, 2]), Some(6));
        assert_eq!(f.homogeneous_degree(&[1, 1]), None);
        assert_eq!(f.homogeneous_components(&[1, 1]).len(), 2);
        assert_eq!(monomials_of_degree(&[3, 2], 6).len(), 2);
        assert_eq!(monomials_of_degree(&[1, 1, 1], 2).len(), 6);
        assert!(monomials_of_degree(&[3, 2], 1).is_empty());
    }

    #[test]
    fn serializes_as_sorted_pairs() {
        let p = pr(5);
        let f = PolyFp::from_terms(p, 2, [(vec![0, 3], 4), (vec![2, 0], 1)]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"prime":5,"nvars":2,"terms":[[[0,3],4],[[2,0],1]]}"#);
        let back: PolyFp = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
