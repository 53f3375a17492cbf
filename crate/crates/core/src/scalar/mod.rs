//! Coefficient rings for all tensor computations.
//!
//! Three families of backends implement [`Scalar`]:
//!
//! - [`GaussianRational`]: exact `Q(i)` arithmetic over arbitrary-precision
//!   rationals ([`Rational`]).
//! - [`ParamPoly`]: multivariate polynomials with Gaussian-rational
//!   coefficients and a structural conjugation that swaps paired
//!   indeterminates. Used to verify identities with free parameters.
//! - [`FloatComplex`]: double-precision complex numbers, for targets whose
//!   realization needs irrational parameters.
//!
//! Every value is immutable and `Send + Sync`.

mod float;
mod gaussian;
mod poly;
mod rational;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

pub use float::FloatComplex;
pub use gaussian::GaussianRational;
pub use poly::{Monomial, ParamPoly, PolyRing, Symbol};
pub use rational::{exact_sqrt, Rational};

use crate::error::Result;

/// Which arithmetic a backend performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Symbolic,
    Float,
}

/// A commutative coefficient ring with conjugation.
///
/// All arithmetic is by value; implementations are cheap enough to clone for
/// the 4-dimensional tensors this crate works with.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_gaussian(z: &GaussianRational) -> Self;
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;

    /// Multiplicative inverse; fails with "non-invertible scalar" on zero
    /// (and on non-constant polynomials).
    fn inv(&self) -> Result<Self>;

    /// Square root of a non-negative real value, when it is representable.
    ///
    /// Exact backends return `None` unless the value is the square of a
    /// rational; the floating backend always succeeds.
    fn try_sqrt(&self) -> Option<Self>;

    /// Size used for floating residuals. For polynomials this is the largest
    /// coefficient modulus.
    fn magnitude(&self) -> f64;

    /// Numeric value, if the scalar is a constant.
    fn to_complex(&self) -> Option<Complex64>;

    /// Embed a floating value. Only the floating backend accepts this.
    fn from_complex(z: Complex64) -> Option<Self>;

    fn is_exact() -> bool {
        Self::BACKEND != Backend::Float
    }

    fn from_rational(q: &Rational) -> Self {
        Self::from_gaussian(&GaussianRational::real(q.clone()))
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_int(n))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(&Rational::new(n, d))
    }

    /// The imaginary unit.
    fn i() -> Self {
        Self::from_gaussian(&GaussianRational::i())
    }

    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * rhs.inv()?)
    }

    fn half(&self) -> Self {
        self.clone() * Self::from_ratio(1, 2)
    }

    /// Exact zero for exact backends, `magnitude() <= tol` otherwise.
    fn within(&self, tol: f64) -> bool {
        if Self::is_exact() {
            self.is_zero()
        } else {
            self.magnitude() <= tol
        }
    }
}
