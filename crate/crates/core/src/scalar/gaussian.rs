use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::{exact_sqrt, Backend, Rational, Scalar};
use crate::error::{Error, Result};

/// Exact element of `Q(i)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational { re, im: Rational::zero() }
    }

    pub fn i() -> Self {
        GaussianRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussianRational::new(re.into(), im.into())
    }

    /// `re² + im²`.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussianRational { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        GaussianRational { re, im }
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl Scalar for GaussianRational {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        GaussianRational::default()
    }

    fn one() -> Self {
        GaussianRational::real(Rational::one())
    }

    fn from_gaussian(z: &GaussianRational) -> Self {
        z.clone()
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    fn inv(&self) -> Result<Self> {
        let n = self.norm_sqr();
        let n_inv = n.inv()?;
        Ok(GaussianRational { re: &self.re * &n_inv, im: -(&self.im * &n_inv) })
    }

    fn try_sqrt(&self) -> Option<Self> {
        if !self.is_real() {
            return None;
        }
        exact_sqrt(&self.re).ok().flatten().map(GaussianRational::real)
    }

    fn magnitude(&self) -> f64 {
        self.norm_sqr().to_f64().sqrt()
    }

    fn to_complex(&self) -> Option<Complex64> {
        Some(Complex64::new(self.re.to_f64(), self.im.to_f64()))
    }

    fn from_complex(_: Complex64) -> Option<Self> {
        None
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) if self.im.is_negative() => write!(f, "({}-{}i)", self.re, self.im.abs()),
            (false, false) => write!(f, "({}+{}i)", self.re, self.im),
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize)]
struct ReIm<'a> {
    re: &'a Rational,
    im: &'a Rational,
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReIm { re: &self.re, im: &self.im }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    /// Accepts `{"re": q, "im": q}` or a bare rational.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        gaussian_from_value(&v).map_err(de::Error::custom)
    }
}

pub(crate) fn gaussian_from_value(v: &serde_json::Value) -> Result<GaussianRational> {
    let part = |x: Option<&serde_json::Value>| -> Result<Rational> {
        match x {
            None => Ok(Rational::zero()),
            Some(x) => serde_json::from_value(x.clone()).map_err(|e| Error::Parse(e.to_string())),
        }
    };
    match v {
        serde_json::Value::Object(m) => {
            if m.keys().any(|k| k != "re" && k != "im") {
                return Err(Error::Parse(format!("unexpected scalar object {v}")));
            }
            Ok(GaussianRational::new(part(m.get("re"))?, part(m.get("im"))?))
        }
        other => Ok(GaussianRational::real(part(Some(other))?)),
    }
}
