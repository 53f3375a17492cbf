use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::{Backend, GaussianRational, Scalar};
use crate::error::{Error, Result};

/// Double-precision complex scalar.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct FloatComplex(pub Complex64);

impl FloatComplex {
    pub fn new(re: f64, im: f64) -> Self {
        FloatComplex(Complex64::new(re, im))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }
}

impl From<f64> for FloatComplex {
    fn from(x: f64) -> Self {
        FloatComplex::new(x, 0.0)
    }
}

impl Add for FloatComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        FloatComplex(self.0 + rhs.0)
    }
}

impl Sub for FloatComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        FloatComplex(self.0 - rhs.0)
    }
}

impl Mul for FloatComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        FloatComplex(self.0 * rhs.0)
    }
}

impl Neg for FloatComplex {
    type Output = Self;
    fn neg(self) -> Self {
        FloatComplex(-self.0)
    }
}

impl Scalar for FloatComplex {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        FloatComplex::default()
    }

    fn one() -> Self {
        FloatComplex::new(1.0, 0.0)
    }

    fn from_gaussian(z: &GaussianRational) -> Self {
        FloatComplex::new(z.re.to_f64(), z.im.to_f64())
    }

    fn is_zero(&self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }

    fn conj(&self) -> Self {
        FloatComplex(self.0.conj())
    }

    fn inv(&self) -> Result<Self> {
        if self.is_zero() || !self.0.is_finite() {
            return Err(Error::NonInvertible);
        }
        Ok(FloatComplex(self.0.inv()))
    }

    fn try_sqrt(&self) -> Option<Self> {
        Some(FloatComplex(self.0.sqrt()))
    }

    fn magnitude(&self) -> f64 {
        self.0.norm()
    }

    fn to_complex(&self) -> Option<Complex64> {
        Some(self.0)
    }

    fn from_complex(z: Complex64) -> Option<Self> {
        Some(FloatComplex(z))
    }
}

impl fmt::Display for FloatComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im == 0.0 {
            write!(f, "{}", self.0.re)
        } else {
            write!(f, "({}{:+}i)", self.0.re, self.0.im)
        }
    }
}

impl fmt::Debug for FloatComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize)]
struct ReIm {
    re: f64,
    im: f64,
}

impl Serialize for FloatComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReIm { re: self.0.re, im: self.0.im }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FloatComplex {
    /// Accepts `{"re": f, "im": f}`, bare numbers, or any exact scalar form.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        float_from_value(&v).map_err(de::Error::custom)
    }
}

fn float_from_value(v: &serde_json::Value) -> Result<FloatComplex> {
    use serde_json::Value;
    let part = |x: Option<&Value>| -> Result<f64> {
        match x {
            None => Ok(0.0),
            Some(Value::Number(n)) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}"))),
            Some(other) => {
                let z = super::gaussian::gaussian_from_value(other)?;
                if !z.is_real() {
                    return Err(Error::Parse(format!("nested complex value {other}")));
                }
                Ok(z.re.to_f64())
            }
        }
    };
    match v {
        Value::Object(m) => {
            if m.keys().any(|k| k != "re" && k != "im") {
                return Err(Error::Parse(format!("unexpected scalar object {v}")));
            }
            Ok(FloatComplex::new(part(m.get("re"))?, part(m.get("im"))?))
        }
        other => Ok(FloatComplex::new(part(Some(other))?, 0.0)),
    }
}
