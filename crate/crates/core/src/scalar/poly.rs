use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::{Backend, GaussianRational, Scalar};
use crate::error::{Error, Result};

/// A named indeterminate and the index of its conjugate partner (itself when
/// the symbol is real).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub partner: usize,
}

/// Ordered symbol table shared by all polynomials of one computation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyRing {
    symbols: Vec<Symbol>,
}

impl PolyRing {
    pub fn new() -> Self {
        PolyRing::default()
    }

    /// Adds a self-conjugate indeterminate.
    pub fn real(mut self, name: &str) -> Self {
        let idx = self.symbols.len();
        self.symbols.push(Symbol { name: name.to_string(), partner: idx });
        self
    }

    /// Adds a conjugate pair `(name, conj_name)`; conjugation swaps them.
    pub fn pair(mut self, name: &str, conj_name: &str) -> Self {
        let idx = self.symbols.len();
        self.symbols.push(Symbol { name: name.to_string(), partner: idx + 1 });
        self.symbols.push(Symbol { name: conj_name.to_string(), partner: idx });
        self
    }

    pub fn build(self) -> Arc<PolyRing> {
        Arc::new(self)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    /// The polynomial consisting of the single indeterminate `name`.
    ///
    /// Panics if the symbol was never declared.
    pub fn var(self: &Arc<Self>, name: &str) -> ParamPoly {
        let idx = self
            .index_of(name)
            .unwrap_or_else(|| panic!("undeclared indeterminate {name}"));
        let mut exps = vec![0; idx + 1];
        exps[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(exps), GaussianRational::one());
        ParamPoly { ring: Some(self.clone()), terms }
    }
}

/// Exponent vector over the ring's symbol order, with trailing zeros trimmed
/// so that every monomial has exactly one representation.
///
/// Ordered graded-lexicographically: total degree first, then exponents in
/// declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let exps = (0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0) + other.0.get(i).copied().unwrap_or(0))
            .collect();
        Monomial(exps)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in conjugation-aware indeterminates with Gaussian-rational
/// coefficients. Zero coefficients are never stored.
#[derive(Clone)]
pub struct ParamPoly {
    ring: Option<Arc<PolyRing>>,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl ParamPoly {
    pub fn constant(c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial(Vec::new()), c);
        }
        ParamPoly { ring: None, terms }
    }

    pub fn ring(&self) -> Option<&Arc<PolyRing>> {
        self.ring.as_ref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.0.is_empty())
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms.get(&Monomial(Vec::new())).cloned().unwrap_or_default()
    }

    /// Substitutes values for every indeterminate that occurs in `self`.
    ///
    /// Fails with "unbound indeterminate" when a symbol is missing and with
    /// "reality violation" when paired symbols are not given conjugate values.
    pub fn evaluate<S: Scalar>(&self, assignment: &BTreeMap<String, S>) -> Result<S> {
        let ring = match &self.ring {
            Some(r) => r,
            None => return Ok(S::from_gaussian(&self.constant_term())),
        };
        let mut used = vec![false; ring.symbols.len()];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                used[i] |= e > 0;
            }
        }
        let mut values: Vec<Option<S>> = vec![None; ring.symbols.len()];
        for (i, sym) in ring.symbols.iter().enumerate() {
            if !used[i] {
                continue;
            }
            let v = assignment
                .get(&sym.name)
                .ok_or_else(|| Error::UnboundIndeterminate(sym.name.clone()))?;
            values[i] = Some(v.clone());
        }
        for sym in &ring.symbols {
            let Some(v) = assignment.get(&sym.name) else { continue };
            let partner = &ring.symbols[sym.partner];
            let Some(w) = assignment.get(&partner.name) else { continue };
            let defect = v.conj() - w.clone();
            let scale = 1.0f64.max(v.magnitude());
            if !defect.within(1e-12 * scale) {
                return Err(Error::RealityViolation(format!(
                    "{} = {} but {} = {}",
                    sym.name, v, partner.name, w
                )));
            }
        }
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = S::from_gaussian(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = values[i].as_ref().expect("bound above");
                for _ in 0..e {
                    t = t * v.clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    fn merged_ring(&self, other: &ParamPoly) -> Option<Arc<PolyRing>> {
        match (&self.ring, &other.ring) {
            (None, r) | (r, None) => r.clone(),
            (Some(a), Some(b)) => {
                assert!(
                    Arc::ptr_eq(a, b) || **a == **b,
                    "polynomials from different rings combined"
                );
                Some(a.clone())
            }
        }
    }

    fn insert(terms: &mut BTreeMap<Monomial, GaussianRational>, m: Monomial, c: GaussianRational) {
        use std::collections::btree_map::Entry;
        match terms.entry(m) {
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }
}

impl PartialEq for ParamPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Add for ParamPoly {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let ring = self.merged_ring(&rhs);
        let mut terms = self.terms;
        for (m, c) in rhs.terms {
            ParamPoly::insert(&mut terms, m, c);
        }
        ParamPoly { ring, terms }
    }
}

impl Neg for ParamPoly {
    type Output = Self;
    fn neg(self) -> Self {
        let terms = self.terms.into_iter().map(|(m, c)| (m, -c)).collect();
        ParamPoly { ring: self.ring, terms }
    }
}

impl Sub for ParamPoly {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for ParamPoly {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let ring = self.merged_ring(&rhs);
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                ParamPoly::insert(&mut terms, ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        ParamPoly { ring, terms }
    }
}

impl Scalar for ParamPoly {
    const BACKEND: Backend = Backend::Symbolic;

    fn zero() -> Self {
        ParamPoly { ring: None, terms: BTreeMap::new() }
    }

    fn one() -> Self {
        ParamPoly::constant(GaussianRational::one())
    }

    fn from_gaussian(z: &GaussianRational) -> Self {
        ParamPoly::constant(z.clone())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Structural conjugation: conjugates coefficients and swaps each
    /// indeterminate with its partner.
    fn conj(&self) -> Self {
        let Some(ring) = &self.ring else {
            return ParamPoly::constant(self.constant_term().conj());
        };
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut exps = vec![0; ring.symbols.len()];
            for (i, &e) in m.0.iter().enumerate() {
                exps[ring.symbols[i].partner] += e;
            }
            ParamPoly::insert(&mut terms, Monomial::new(exps), c.conj());
        }
        ParamPoly { ring: self.ring.clone(), terms }
    }

    fn inv(&self) -> Result<Self> {
        if !self.is_constant() {
            return Err(Error::NonInvertible);
        }
        Ok(ParamPoly::constant(self.constant_term().inv()?))
    }

    fn try_sqrt(&self) -> Option<Self> {
        if !self.is_constant() {
            return None;
        }
        self.constant_term().try_sqrt().map(ParamPoly::constant)
    }

    fn magnitude(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    fn to_complex(&self) -> Option<Complex64> {
        if self.is_constant() {
            self.constant_term().to_complex()
        } else {
            None
        }
    }

    fn from_complex(_: Complex64) -> Option<Self> {
        None
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<&str> = self
            .ring
            .as_ref()
            .map(|r| r.symbols.iter().map(|s| s.name.as_str()).collect())
            .unwrap_or_default();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut coeff = c.clone();
            let negative = c.im.is_zero() && c.re.is_negative();
            if k > 0 {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
                if negative {
                    coeff = -coeff;
                }
            } else if negative && !m.0.is_empty() {
                write!(f, "-")?;
                coeff = -coeff;
            }
            let unit = coeff == GaussianRational::one();
            if m.0.is_empty() || !unit {
                write!(f, "{coeff}")?;
            }
            let mut first = m.0.is_empty() || !unit;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if first {
                    write!(f, "*")?;
                }
                first = true;
                write!(f, "{}", names.get(i).copied().unwrap_or("?"))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
