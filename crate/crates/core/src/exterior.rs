//! Dense exterior algebra over a fixed 4-dimensional space.
//!
//! A k-form is stored by its coefficients on the lexicographically ordered
//! monomials `Ψ^{i₁}∧…∧Ψ^{iₖ}`, `i₁ < … < iₖ`. Indices are 0-based in code
//! and 1-based in every printed or serialized form.
//!
//! Conventions:
//! - `(α∧β)(x, y) = α(x)β(y) − α(y)β(x)`, so the coefficient of `Ψ^a∧Ψ^b`
//!   in a 2-form `ω` is `ω(Ψ_a, Ψ_b)`.
//! - The inner product of decomposable forms is the Gram determinant of the
//!   factors, with no `1/k!` normalisation.
//! - The Hodge star is defined by `ω₁∧⋆ω₂ = ⟨ω₁, ω₂⟩ dν` for a volume form
//!   `dν` chosen per frame.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{determinant, Matrix4};
use crate::scalar::Scalar;

pub const DIM: usize = 4;

const MONOMIALS: [&[&[usize]]; 5] = [
    &[&[]],
    &[&[0], &[1], &[2], &[3]],
    &[&[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3]],
    &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
    &[&[0, 1, 2, 3]],
];

/// Basis monomials of degree `k` in storage order.
pub fn monomials(k: usize) -> &'static [&'static [usize]] {
    MONOMIALS[k]
}

/// Position of an ascending index list in [`monomials`].
pub fn monomial_index(indices: &[usize]) -> Option<usize> {
    MONOMIALS.get(indices.len())?.iter().position(|m| *m == indices)
}

/// Sorts `indices` in place and returns the permutation sign, or `None` when
/// an index repeats.
pub fn sort_with_sign(indices: &mut [usize]) -> Option<i8> {
    let mut sign = 1i8;
    for i in 0..indices.len() {
        for j in 0..indices.len() - 1 - i {
            match indices[j].cmp(&indices[j + 1]) {
                std::cmp::Ordering::Greater => {
                    indices.swap(j, j + 1);
                    sign = -sign;
                }
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    if indices.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

fn signed<S: Scalar>(s: S, sign: i8) -> S {
    if sign < 0 {
        -s
    } else {
        s
    }
}

/// Complementary monomial and the sign of `Ψ^I ∧ Ψ^{I^c} = sign · Ψ^{1234}`.
fn complement(indices: &[usize]) -> (Vec<usize>, i8) {
    let comp: Vec<usize> = (0..DIM).filter(|i| !indices.contains(i)).collect();
    let mut all: Vec<usize> = indices.iter().chain(&comp).copied().collect();
    let sign = sort_with_sign(&mut all).expect("disjoint");
    (comp, sign)
}

/// A k-form, `0 ≤ k ≤ 4`.
#[derive(Clone, PartialEq)]
pub struct KForm<S> {
    degree: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> KForm<S> {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= DIM, "degree exceeds dimension");
        KForm { degree, coeffs: vec![S::zero(); MONOMIALS[degree].len()] }
    }

    /// Builds a form from coefficients in storage order.
    pub fn from_coeffs(degree: usize, coeffs: Vec<S>) -> Result<Self> {
        if degree > DIM {
            return Err(Error::DegreeOverflow(degree));
        }
        assert_eq!(coeffs.len(), MONOMIALS[degree].len(), "coefficient count");
        Ok(KForm { degree, coeffs })
    }

    /// `Ψ^{i₁}∧…∧Ψ^{iₖ}` for arbitrary (possibly unsorted) 0-based indices.
    pub fn monomial(indices: &[usize]) -> Self {
        let mut form = KForm::zero(indices.len());
        let mut idx = indices.to_vec();
        if let Some(sign) = sort_with_sign(&mut idx) {
            let pos = monomial_index(&idx).expect("valid monomial");
            form.coeffs[pos] = signed(S::one(), sign);
        }
        form
    }

    /// Sum of `c · Ψ^I` over the given terms.
    pub fn from_terms(degree: usize, terms: &[(&[usize], S)]) -> Self {
        terms.iter().fold(KForm::zero(degree), |acc, (idx, c)| {
            assert_eq!(idx.len(), degree);
            acc + KForm::monomial(idx).scale(c)
        })
    }

    pub fn scalar(s: S) -> Self {
        KForm { degree: 0, coeffs: vec![s] }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `Ψ^I` for ascending 0-based `I`.
    pub fn coeff(&self, indices: &[usize]) -> &S {
        assert_eq!(indices.len(), self.degree);
        &self.coeffs[monomial_index(indices).expect("ascending indices")]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static [usize], &S)> {
        MONOMIALS[self.degree].iter().copied().zip(self.coeffs.iter())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        KForm { degree: self.degree, coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Coefficient-wise change of scalar ring.
    pub fn map_into<T: Scalar>(&self, f: impl Fn(&S) -> T) -> KForm<T> {
        KForm { degree: self.degree, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    pub fn conj_coeffs(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Every coefficient [`Scalar::within`] `tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.within(tol))
    }

    pub fn wedge(&self, other: &KForm<S>) -> Result<KForm<S>> {
        let degree = self.degree + other.degree;
        if degree > DIM {
            return Err(Error::DegreeOverflow(degree));
        }
        let mut out = KForm::<S>::zero(degree);
        for (a, ca) in self.iter().filter(|(_, c)| !c.is_zero()) {
            for (b, cb) in other.iter().filter(|(_, c)| !c.is_zero()) {
                let mut idx: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                let Some(sign) = sort_with_sign(&mut idx) else { continue };
                let pos = monomial_index(&idx).expect("valid");
                let term = signed(ca.clone() * cb.clone(), sign);
                out.coeffs[pos] = out.coeffs[pos].clone() + term;
            }
        }
        Ok(out)
    }

    /// Substitutes `Ψ^i ↦ Σ_j m[i][j] Ψ^j` in every factor.
    ///
    /// With `m` the matrix of a linear map `T` (`TΨ_j = Σ_i m[i][j] Ψ_i`),
    /// this is the pullback `(T^*ω)(x, …) = ω(Tx, …)`. With `m` a change of
    /// covector basis it re-expresses the form in the new basis.
    pub fn pullback(&self, m: &Matrix4<S>) -> KForm<S> {
        let images: Vec<KForm<S>> = (0..DIM)
            .map(|i| KForm { degree: 1, coeffs: m.0[i].to_vec() })
            .collect();
        let mut out = KForm::zero(self.degree);
        for (idx, c) in self.iter().filter(|(_, c)| !c.is_zero()) {
            let mut term = KForm::scalar(c.clone());
            for &i in idx {
                term = term.wedge(&images[i]).expect("same degree");
            }
            out = out + term;
        }
        out
    }

    /// Infinitesimal pullback: the derivation extending `Ψ^i ↦ Σ_j m[i][j] Ψ^j`.
    pub fn derivation(&self, m: &Matrix4<S>) -> KForm<S> {
        let mut out = KForm::zero(self.degree);
        for (idx, c) in self.iter().filter(|(_, c)| !c.is_zero()) {
            for slot in 0..idx.len() {
                for j in 0..DIM {
                    let factor = &m.0[idx[slot]][j];
                    if factor.is_zero() {
                        continue;
                    }
                    let mut replaced = idx.to_vec();
                    replaced[slot] = j;
                    out = out + KForm::monomial(&replaced).scale(&(c.clone() * factor.clone()));
                }
            }
        }
        out
    }

    pub fn as_covector(&self) -> Covector<S> {
        assert_eq!(self.degree, 1, "not a 1-form");
        Covector(std::array::from_fn(|i| self.coeffs[i].clone()))
    }

    /// Renders with the given covector symbol, e.g. `Ψ` or `e`.
    pub fn display_with(&self, symbol: &str) -> String {
        let terms: Vec<String> = self
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(idx, c)| {
                let mono = idx
                    .iter()
                    .map(|&i| format!("{symbol}{}", superscript(i + 1)))
                    .collect::<Vec<_>>()
                    .join("∧");
                if idx.is_empty() {
                    format!("{c}")
                } else {
                    format!("({c})·{mono}")
                }
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

pub(crate) fn superscript(n: usize) -> char {
    ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'][n]
}

pub(crate) fn subscript(n: usize) -> char {
    ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'][n]
}

impl<S: Scalar> Add for KForm<S> {
    type Output = KForm<S>;
    fn add(self, rhs: KForm<S>) -> KForm<S> {
        assert_eq!(self.degree, rhs.degree, "degree mismatch");
        let coeffs = self.coeffs.into_iter().zip(rhs.coeffs).map(|(a, b)| a + b).collect();
        KForm { degree: self.degree, coeffs }
    }
}

impl<S: Scalar> Sub for KForm<S> {
    type Output = KForm<S>;
    fn sub(self, rhs: KForm<S>) -> KForm<S> {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for KForm<S> {
    type Output = KForm<S>;
    fn neg(self) -> KForm<S> {
        KForm { degree: self.degree, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<S: Scalar> fmt::Debug for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("Ψ"))
    }
}

impl<S: Scalar> fmt::Display for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("Ψ"))
    }
}

/// 1-based index string used as a JSON key, e.g. `[0, 2]` → `"13"`.
pub fn index_key(indices: &[usize]) -> String {
    indices.iter().map(|i| char::from(b'1' + *i as u8)).collect()
}

/// Parses a key such as `"13"` or `"31"` into sorted 0-based indices and the
/// sign of the sorting permutation.
pub fn parse_index_key(key: &str) -> Result<(Vec<usize>, i8)> {
    let mut idx = Vec::with_capacity(key.len());
    for ch in key.chars() {
        match ch {
            '1'..='4' => idx.push(ch as usize - '1' as usize),
            _ => return Err(Error::Parse(format!("bad index key {key:?}"))),
        }
    }
    let sign = sort_with_sign(&mut idx).ok_or_else(|| Error::Parse(format!("repeated index in {key:?}")))?;
    Ok((idx, sign))
}

impl<S: Scalar + Serialize> Serialize for KForm<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        #[derive(Serialize)]
        struct Repr<'a, S> {
            degree: usize,
            coeffs: BTreeMap<String, &'a S>,
        }
        let coeffs = self
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(idx, c)| (index_key(idx), c))
            .collect();
        Repr { degree: self.degree, coeffs }.serialize(s)
    }
}

impl<S: Scalar + serde::de::DeserializeOwned> KForm<S> {
    /// Reads `{"degree": k, "coeffs": {"13": scalar, …}}`. When `degree` is
    /// absent it is inferred from the keys, falling back to `default_degree`.
    pub fn from_json(v: &serde_json::Value, default_degree: Option<usize>) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse(format!("expected form object, got {v}")))?;
        if let Some(k) = obj.keys().find(|k| *k != "degree" && *k != "coeffs") {
            return Err(Error::Parse(format!("unexpected field {k:?} in form")));
        }
        let coeffs = match obj.get("coeffs") {
            Some(serde_json::Value::Object(m)) => m.clone(),
            Some(other) => return Err(Error::Parse(format!("coeffs must be an object, got {other}"))),
            None => serde_json::Map::new(),
        };
        let degree = match obj.get("degree") {
            Some(d) => d
                .as_u64()
                .map(|d| d as usize)
                .ok_or_else(|| Error::Parse(format!("bad degree {d}")))?,
            None => match coeffs.keys().next() {
                Some(k) => k.len(),
                None => default_degree.ok_or_else(|| Error::Parse("form degree missing".into()))?,
            },
        };
        if degree > DIM {
            return Err(Error::DegreeOverflow(degree));
        }
        let mut form = KForm::<S>::zero(degree);
        for (key, val) in coeffs {
            let (idx, sign) = parse_index_key(&key)?;
            if idx.len() != degree {
                return Err(Error::DegreeMismatch(idx.len(), degree));
            }
            let c: S = serde_json::from_value(val).map_err(|e| Error::Parse(format!("coefficient {key}: {e}")))?;
            let pos = monomial_index(&idx).expect("sorted");
            form.coeffs[pos] = form.coeffs[pos].clone() + signed(c, sign);
        }
        Ok(form)
    }
}

impl<'de, S: Scalar + serde::de::DeserializeOwned> Deserialize<'de> for KForm<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        KForm::from_json(&v, None).map_err(de::Error::custom)
    }
}

/// Tangent vector components `v = Σ vᵢ Ψᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<S>(pub [S; 4]);

/// Covector components `ω = Σ ωᵢ Ψ^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector<S>(pub [S; 4]);

impl<S: Scalar> Vector<S> {
    pub fn basis(i: usize) -> Self {
        Vector(std::array::from_fn(|j| if i == j { S::one() } else { S::zero() }))
    }
}

impl<S: Scalar> Covector<S> {
    pub fn zero() -> Self {
        Covector(std::array::from_fn(|_| S::zero()))
    }

    pub fn to_form(&self) -> KForm<S> {
        KForm { degree: 1, coeffs: self.0.to_vec() }
    }

    pub fn eval(&self, v: &Vector<S>) -> S {
        self.0.iter().zip(&v.0).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        Covector(std::array::from_fn(|i| self.0[i].clone() * s.clone()))
    }
}

/// A basis of the 4-dimensional space with its metric and volume form.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<S> {
    metric: Matrix4<S>,
    inverse: Matrix4<S>,
    /// `dν = volume · Ψ¹∧Ψ²∧Ψ³∧Ψ⁴`.
    volume: S,
    vector_symbol: String,
    covector_symbol: String,
}

impl<S: Scalar> Frame<S> {
    /// `metric[i][j] = g(Ψᵢ, Ψⱼ)`; `volume_order` lists the covectors whose
    /// wedge (in that order) is the volume form.
    pub fn new(metric: Matrix4<S>, volume_order: [usize; 4], vector_symbol: &str, covector_symbol: &str) -> Result<Self> {
        if metric != metric.transpose() {
            return Err(Error::Parse("metric is not symmetric".into()));
        }
        let inverse = metric.inverse().map_err(|_| Error::SingularMetric)?;
        let vol = volume_order
            .iter()
            .try_fold(KForm::scalar(S::one()), |acc, &i| acc.wedge(&KForm::monomial(&[i])))?;
        let volume = vol.coeffs[0].clone();
        if volume.is_zero() {
            return Err(Error::Parse("volume order repeats an index".into()));
        }
        Ok(Frame {
            metric,
            inverse,
            volume,
            vector_symbol: vector_symbol.to_string(),
            covector_symbol: covector_symbol.to_string(),
        })
    }

    /// The hyperbolic frame `⟨Ψ₁,Ψ₃⟩ = ⟨Ψ₂,Ψ₄⟩ = 1` with volume form
    /// `dν = Ψ¹∧Ψ³∧Ψ²∧Ψ⁴`.
    pub fn hyperbolic() -> Self {
        let metric = Matrix4::from_fn(|i, j| if (i + 2) % 4 == j { S::one() } else { S::zero() });
        Frame::new(metric, [0, 2, 1, 3], "Ψ", "Ψ").expect("hyperbolic frame is valid")
    }

    pub fn metric(&self) -> &Matrix4<S> {
        &self.metric
    }

    pub fn inverse_metric(&self) -> &Matrix4<S> {
        &self.inverse
    }

    pub fn covector_symbol(&self) -> &str {
        &self.covector_symbol
    }

    pub fn vector_symbol(&self) -> &str {
        &self.vector_symbol
    }

    pub fn volume_form(&self) -> KForm<S> {
        KForm::scalar(self.volume.clone()).wedge(&KForm::monomial(&[0, 1, 2, 3])).expect("degree 4")
    }

    pub fn vector_inner(&self, u: &Vector<S>, v: &Vector<S>) -> S {
        let gv = self.metric.apply(&v.0);
        u.0.iter().zip(&gv).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    /// `⟨Ψ^I, Ψ^J⟩ = det[g^{I_r J_s}]`.
    fn monomial_inner(&self, a: &[usize], b: &[usize]) -> S {
        let m: Vec<Vec<S>> = a
            .iter()
            .map(|&i| b.iter().map(|&j| self.inverse.0[i][j].clone()).collect())
            .collect();
        determinant(&m)
    }

    /// Induced (bilinear) inner product on forms of equal degree.
    pub fn form_inner(&self, a: &KForm<S>, b: &KForm<S>) -> Result<S> {
        if a.degree != b.degree {
            return Err(Error::DegreeMismatch(a.degree, b.degree));
        }
        let mut acc = S::zero();
        for (ia, ca) in a.iter().filter(|(_, c)| !c.is_zero()) {
            for (ib, cb) in b.iter().filter(|(_, c)| !c.is_zero()) {
                let g = self.monomial_inner(ia, ib);
                if !g.is_zero() {
                    acc = acc + ca.clone() * cb.clone() * g;
                }
            }
        }
        Ok(acc)
    }

    /// Hodge star, solved from `ω₁∧⋆ω₂ = ⟨ω₁, ω₂⟩ dν` on basis monomials.
    pub fn hodge_star(&self, a: &KForm<S>) -> KForm<S> {
        let k = a.degree;
        let mut out = KForm::<S>::zero(DIM - k);
        for (j, cj) in a.iter().filter(|(_, c)| !c.is_zero()) {
            for &i in MONOMIALS[k] {
                let g = self.monomial_inner(i, j);
                if g.is_zero() {
                    continue;
                }
                let (comp, sign) = complement(i);
                let pos = monomial_index(&comp).expect("valid");
                let term = signed(cj.clone() * g * self.volume.clone(), sign);
                out.coeffs[pos] = out.coeffs[pos].clone() + term;
            }
        }
        out
    }

    /// Raises an index: `g(sharp(ω), y) = ω(y)`.
    pub fn sharp(&self, w: &Covector<S>) -> Vector<S> {
        Vector(self.inverse.apply(&w.0))
    }

    /// Lowers an index: `flat(v)(y) = g(v, y)`.
    pub fn flat(&self, v: &Vector<S>) -> Covector<S> {
        Covector(self.metric.apply(&v.0))
    }
}
