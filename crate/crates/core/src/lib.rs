//! Exact-arithmetic engine for left-invariant Kähler–Weyl geometry in
//! dimension four.
//!
//! The crate computes, for a 4-dimensional Lie algebra carrying a Hermitian
//! (signature (0,4)) or para-Hermitian (signature (2,2)) structure, the unique
//! Kähler–Weyl connection, its curvature and alternating Ricci tensor, and
//! solves the inverse problem: given a target 2-form, build a Lie algebra
//! whose alternating Ricci tensor is that target.
//!
//! Module map:
//!
//! - [`scalar`]: coefficient rings (exact, symbolic, floating).
//! - [`exterior`]: forms, wedge, induced inner products, Hodge star.
//! - [`model`]: the two model spaces, 2-form splittings, unitary actions.
//! - [`engine`]: structure constants to curvature, with residual checks.
//! - [`realization`]: constructive solvers and round-trip certificates.
//! - [`cli`]: the `kw4` command-line front end.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod engine;
pub mod error;
pub mod exterior;
pub mod io;
pub mod matrix;
pub mod model;
pub mod realization;
pub mod scalar;

pub use error::{Error, Result};
