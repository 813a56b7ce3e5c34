//! Ideal membership by linear algebra over `F_p`.
//!
//! To decide `g in (g_1, ..., g_s)` we row-reduce the products
//! `x^a * g_j` of the right degree and check whether `g` lies in their
//! span. When every generator is homogeneous for some positive grading the
//! products needed are exactly those in the degree of each homogeneous
//! piece of `g`, so the answer is exact. Otherwise a total-degree bound is
//! used and failure to find a certificate is reported as inconclusive.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::poly::{monomials_of_degree, Monomial, PolyFp};
use crate::basep::Prime;
use crate::error::{Error, Result};

/// Resource bounds shared by the oracle routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Terms of `f^N` (or search nodes) visited before giving up.
    pub max_terms: u64,
    /// Monomials (matrix columns) in one graded piece or degree box.
    pub max_columns: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_terms: 10_000_000,
            max_columns: 4_000,
        }
    }
}

/// Row-echelon span of polynomials, keyed by leading monomial. Rows are
/// monic; distinct rows have distinct leading monomials.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: BTreeMap<Monomial, PolyFp>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Cancels leading terms against existing rows until the leading
    /// monomial is new (or the polynomial vanishes).
    fn reduce(&self, mut v: PolyFp) -> PolyFp {
        let p = v.prime().get();
        let zero_shift = vec![0; v.nvars()];
        while let Some((lead, c)) = v.leading() {
            let Some(row) = self.rows.get(lead) else { break };
            let row = row.clone();
            v.add_scaled_shifted(&row, p - c, &zero_shift);
        }
        v
    }

    /// Adds `v` to the span. Returns false if it was already there.
    pub fn insert(&mut self, v: PolyFp) -> bool {
        let r = self.reduce(v);
        match r.leading() {
            None => false,
            Some((lead, _)) => {
                let lead = lead.clone();
                self.rows.insert(lead, r.monic());
                true
            }
        }
    }

    pub fn contains(&self, v: &PolyFp) -> bool {
        self.reduce(v.clone()).is_zero()
    }
}

/// An ideal of `F_p[x_1, ..., x_n]` given by generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealFp {
    prime: Prime,
    nvars: usize,
    generators: Vec<PolyFp>,
    /// Grading under which the generators are expected to be homogeneous.
    weights: Vec<u64>,
}

impl IdealFp {
    /// Zero generators are dropped. The grading defaults to total degree.
    pub fn new(prime: Prime, nvars: usize, generators: Vec<PolyFp>) -> Self {
        Self::with_weights(prime, vec![1; nvars], generators)
    }

    pub fn with_weights(prime: Prime, weights: Vec<u64>, generators: Vec<PolyFp>) -> Self {
        assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
        let nvars = weights.len();
        let generators = generators
            .into_iter()
            .filter(|g| {
                debug_assert_eq!(g.nvars(), nvars);
                !g.is_zero()
            })
            .collect();
        IdealFp {
            prime,
            nvars,
            generators,
            weights,
        }
    }

    /// `(x_1, ..., x_n)`.
    pub fn maximal(prime: Prime, nvars: usize) -> Self {
        let gens = (0..nvars).map(|i| PolyFp::variable(prime, nvars, i)).collect();
        Self::new(prime, nvars, gens)
    }

    pub fn unit(prime: Prime, nvars: usize) -> Self {
        Self::new(prime, nvars, vec![PolyFp::one(prime, nvars)])
    }

    pub fn principal(g: PolyFp) -> Self {
        Self::new(g.prime(), g.nvars(), vec![g])
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[PolyFp] {
        &self.generators
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// The grading to use for exact membership, if the generators are
    /// homogeneous under either the stored weights or total degree.
    fn grading(&self) -> Option<Vec<u64>> {
        let homogeneous = |w: &[u64]| self.generators.iter().all(|g| g.homogeneous_degree(w).is_some());
        if homogeneous(&self.weights) {
            return Some(self.weights.clone());
        }
        let standard = vec![1; self.nvars];
        homogeneous(&standard).then_some(standard)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.grading().is_some()
    }

    /// Decides `g in self`.
    pub fn contains(&self, g: &PolyFp, limits: &Limits) -> Result<bool> {
        if g.is_zero() {
            return Ok(true);
        }
        if self.generators.is_empty() {
            return Ok(false);
        }
        match self.grading() {
            Some(w) => {
                for (degree, piece) in g.homogeneous_components(&w) {
                    if !self.graded_span(&w, degree, limits)?.contains(&piece) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            None => {
                let bound = g.total_degree().unwrap_or(0)
                    + self
                        .generators
                        .iter()
                        .filter_map(PolyFp::total_degree)
                        .max()
                        .unwrap_or(0);
                self.contains_with_degree_bound(g, bound, limits)
            }
        }
    }

    /// Bounded-degree certificate search: looks for `g = sum h_j g_j` with
    /// `deg(h_j g_j) <= bound`. A miss is inconclusive, not a "no".
    pub fn contains_with_degree_bound(&self, g: &PolyFp, bound: u64, limits: &Limits) -> Result<bool> {
        let ones = vec![1; self.nvars];
        let width: u64 = (0..=bound).map(|t| monomials_of_degree(&ones, t).len() as u64).sum();
        check_columns(width, limits)?;
        let mut span = Echelon::new();
        let mut rows = 0u64;
        for gen in &self.generators {
            let dg = gen.total_degree().unwrap_or(0);
            for t in 0..=bound.saturating_sub(dg) {
                for a in monomials_of_degree(&ones, t) {
                    rows += 1;
                    check_rows(rows, limits)?;
                    let mut v = PolyFp::zero(self.prime, self.nvars);
                    v.add_scaled_shifted(gen, 1, &a);
                    span.insert(v);
                }
            }
        }
        if span.contains(g) {
            Ok(true)
        } else {
            Err(Error::Inconclusive(format!(
                "no certificate up to total degree {bound}; ideal is not homogeneous"
            )))
        }
    }

    /// Span of the degree-`degree` piece of the ideal.
    fn graded_span(&self, weights: &[u64], degree: u64, limits: &Limits) -> Result<Echelon> {
        let width = monomials_of_degree(weights, degree).len();
        check_columns(width as u64, limits)?;
        let mut span = Echelon::new();
        let mut rows = 0u64;
        for gen in &self.generators {
            let dg = gen.homogeneous_degree(weights).expect("graded generators");
            if dg > degree {
                continue;
            }
            for a in monomials_of_degree(weights, degree - dg) {
                if span.rank() == width {
                    return Ok(span);
                }
                rows += 1;
                check_rows(rows, limits)?;
                let mut v = PolyFp::zero(self.prime, self.nvars);
                v.add_scaled_shifted(gen, 1, &a);
                span.insert(v);
            }
        }
        Ok(span)
    }

    pub fn is_unit(&self, limits: &Limits) -> Result<bool> {
        self.contains(&PolyFp::one(self.prime, self.nvars), limits)
    }

    /// Whether every variable lies in the ideal.
    pub fn contains_all_variables(&self, limits: &Limits) -> Result<bool> {
        for i in 0..self.nvars {
            if !self.contains(&PolyFp::variable(self.prime, self.nvars, i), limits)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when this is exactly `(x_1, ..., x_n)`.
    pub fn is_maximal_ideal(&self, limits: &Limits) -> Result<bool> {
        Ok(self.contains_all_variables(limits)? && !self.is_unit(limits)?)
    }

    pub fn is_subset_of(&self, other: &IdealFp, limits: &Limits) -> Result<bool> {
        for g in &self.generators {
            if !other.contains(g, limits)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equals(&self, other: &IdealFp, limits: &Limits) -> Result<bool> {
        Ok(self.is_subset_of(other, limits)? && other.is_subset_of(self, limits)?)
    }

    /// Monic generators with redundant ones removed, lowest degree first.
    /// Minimal when the ideal is homogeneous; otherwise only deduplicated.
    pub fn minimal_generators(&self, limits: &Limits) -> Result<Vec<PolyFp>> {
        let grading = self.grading();
        let mut gens: Vec<(u64, String, PolyFp)> = Vec::new();
        for g in &self.generators {
            let g = g.monic();
            let deg = match &grading {
                Some(w) => g.homogeneous_degree(w).unwrap_or(0),
                None => 0,
            };
            gens.push((deg, g.to_string(), g));
        }
        gens.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        gens.dedup_by(|a, b| a.1 == b.1);
        if grading.is_none() {
            return Ok(gens.into_iter().map(|t| t.2).collect());
        }
        let mut kept = IdealFp::with_weights(self.prime, self.weights.clone(), Vec::new());
        for (_, _, g) in gens {
            if !kept.contains(&g, limits)? {
                kept.generators.push(g);
            }
        }
        Ok(kept.generators)
    }
}

pub(crate) fn check_rows(rows: u64, limits: &Limits) -> Result<()> {
    if rows > limits.max_terms {
        Err(Error::Budget {
            what: "membership matrix rows",
            needed: rows as u128,
            limit: limits.max_terms as u128,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn check_columns(columns: u64, limits: &Limits) -> Result<()> {
    if columns > limits.max_columns {
        Err(Error::Budget {
            what: "membership matrix columns",
            needed: columns as u128,
            limit: limits.max_columns as u128,
        })
    } else {
        Ok(())
    }
}

impl fmt::Display for IdealFp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn minimal_generators_drop_redundancy() {
        let p = Prime::new(5).unwrap();
        let x = PolyFp::variable(p, 2, 0);
        let y = PolyFp::variable(p, 2, 1);
        let ideal = IdealFp::new(p, 2, vec![y.pow(2), x.scale(4), y.scale(4), x.clone(), y.clone(), x.mul(&y)]);
        let lim = Limits::default();
        assert_eq!(ideal.minimal_generators(&lim).unwrap(), vec![x, y]);
    }

    use super::*;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn poly(p: u64, n: usize, terms: &[(&[u64], u64)]) -> PolyFp {
        PolyFp::from_terms(pr(p), n, terms.iter().map(|(m, c)| (m.to_vec(), *c)))
    }

    #[test]
    fn monomial_ideals() {
        let lim = Limits::default();
        let m = IdealFp::maximal(pr(5), 2);
        assert!(m.contains(&poly(5, 2, &[(&[3, 1], 2), (&[0, 1], 1)]), &lim).unwrap());
        assert!(!m.contains(&poly(5, 2, &[(&[3, 1], 2), (&[0, 0], 1)]), &lim).unwrap());
        assert!(m.is_maximal_ideal(&lim).unwrap());
        assert!(IdealFp::unit(pr(5), 2).is_unit(&lim).unwrap());
    }

    #[test]
    fn linear_forms_span() {
        let lim = Limits::default();
        // (x + y, x - y) contains x when p != 2 ...
        let i = IdealFp::new(
            pr(5),
            2,
            vec![poly(5, 2, &[(&[1, 0], 1), (&[0, 1], 1)]), poly(5, 2, &[(&[1, 0], 1), (&[0, 1], 4)])],
        );
        assert!(i.contains_all_variables(&lim).unwrap());
        // ... but not when p = 2, where both generators are x + y
        let j = IdealFp::new(
            pr(2),
            2,
            vec![poly(2, 2, &[(&[1, 0], 1), (&[0, 1], 1)]), poly(2, 2, &[(&[1, 0], 1), (&[0, 1], 1)])],
        );
        assert!(!j.contains(&PolyFp::variable(pr(2), 2, 0), &lim).unwrap());
    }

    #[test]
    fn weighted_principal_ideal() {
        let lim = Limits::default();
        let f = poly(7, 2, &[(&[2, 0], 1), (&[0, 3], 1)]);
        let i = IdealFp::with_weights(pr(7), vec![3, 2], vec![f.clone()]);
        assert!(i.is_homogeneous());
        let g = f.mul(&poly(7, 2, &[(&[1, 0], 3), (&[0, 0], 1)]));
        assert!(i.contains(&g, &lim).unwrap());
        assert!(!i.contains(&poly(7, 2, &[(&[2, 0], 1)]), &lim).unwrap());
        assert!(i.equals(&IdealFp::principal(f.scale(3)), &lim).unwrap());
    }

    #[test]
    fn non_homogeneous_falls_back_to_degree_bound() {
        let lim = Limits::default();
        // (x - y^2, y - 1) is the point (1, 1); no positive grading fits
        let i = IdealFp::new(
            pr(5),
            2,
            vec![poly(5, 2, &[(&[1, 0], 1), (&[0, 2], 4)]), poly(5, 2, &[(&[0, 1], 1), (&[0, 0], 4)])],
        );
        assert!(!i.is_homogeneous());
        let x_minus_1 = poly(5, 2, &[(&[1, 0], 1), (&[0, 0], 4)]);
        assert!(i.contains(&x_minus_1, &lim).unwrap());
        assert!(matches!(
            i.contains(&PolyFp::variable(pr(5), 2, 0), &lim),
            Err(Error::Inconclusive(_))
        ));
    }

    #[test]
    fn column_budget() {
        let tiny = Limits {
            max_terms: 10,
            max_columns: 3,
        };
        let m = IdealFp::maximal(pr(3), 3);
        let g = poly(3, 3, &[(&[2, 2, 2], 1)]);
        assert!(matches!(m.contains(&g, &tiny), Err(Error::Budget { .. })));
    }
}
