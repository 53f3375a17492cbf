//! Constructive realization of alternating Ricci tensors.
//!
//! The six-parameter family
//!
//! ```text
//! [Ψ₁,Ψ₂] = ε₁Ψ₁      [Ψ₁,Ψ₄] = α₃Ψ₁      [Ψ₂,Ψ₃] = −α̃₃Ψ₃
//! [Ψ₂,Ψ₄] = α₂Ψ₁ − α̃₂Ψ₃                    [Ψ₃,Ψ₄] = ε̃₁Ψ₃
//! ```
//!
//! is integrable for both model structures and has
//! `ρ_a = α̃₂ε₁Ψ¹²+α̃₂α₃Ψ¹⁴−α₂α̃₃Ψ²³+α₂ε̃₁Ψ³⁴`. The solvers pick parameters
//! for a normalised representative of the target and then move the bracket
//! by a unitary element so that `ρ_a` lands exactly on the target.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{check_suite, LieAlgebra4, Residual, VerificationReport};
use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::model::{ModelKind, ModelSpace, UnitaryElement, FLOAT_TOL};
use crate::scalar::{FloatComplex, GaussianRational, ParamPoly, PolyRing, Scalar};

/// Parameter names in declaration order.
pub const PARAM_NAMES: [&str; 6] = ["ε₁", "ε̃₁", "α₂", "α̃₂", "α₃", "α̃₃"];

/// Parameters of the family. In the Hermitian setting the tilde values are
/// the conjugates of the untilded ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams<S> {
    pub setting: ModelKind,
    pub eps1: S,
    pub eps1_t: S,
    pub alpha2: S,
    pub alpha2_t: S,
    pub alpha3: S,
    pub alpha3_t: S,
}

impl<S: Scalar> FamilyParams<S> {
    /// Para setting: six independent real parameters.
    pub fn para(eps1: S, eps1_t: S, alpha2: S, alpha2_t: S, alpha3: S, alpha3_t: S) -> Self {
        FamilyParams { setting: ModelKind::Para, eps1, eps1_t, alpha2, alpha2_t, alpha3, alpha3_t }
    }

    /// Hermitian setting: `ε̃₁ = ε̄₁`, `α̃₂ = ᾱ₂`, `α̃₃ = ᾱ₃`.
    pub fn hermitian(eps1: S, alpha2: S, alpha3: S) -> Self {
        FamilyParams {
            setting: ModelKind::Hermitian,
            eps1_t: eps1.conj(),
            alpha2_t: alpha2.conj(),
            alpha3_t: alpha3.conj(),
            eps1,
            alpha2,
            alpha3,
        }
    }

    pub fn zero(setting: ModelKind) -> Self {
        FamilyParams {
            setting,
            eps1: S::zero(),
            eps1_t: S::zero(),
            alpha2: S::zero(),
            alpha2_t: S::zero(),
            alpha3: S::zero(),
            alpha3_t: S::zero(),
        }
    }

    pub fn values(&self) -> [&S; 6] {
        [&self.eps1, &self.eps1_t, &self.alpha2, &self.alpha2_t, &self.alpha3, &self.alpha3_t]
    }

    /// Checks the setting's reality conditions.
    pub fn validate(&self) -> Result<()> {
        let v = self.values();
        let ok = |a: &S, b: &S| (a.clone() - b.clone()).within(FLOAT_TOL);
        match self.setting {
            ModelKind::Hermitian => {
                for k in [0, 2, 4] {
                    if !ok(&v[k].conj(), v[k + 1]) {
                        return Err(Error::RealityViolation(format!("{} ≠ conj({})", PARAM_NAMES[k + 1], PARAM_NAMES[k])));
                    }
                }
            }
            ModelKind::Para => {
                for k in 0..6 {
                    if !ok(&v[k].conj(), v[k]) {
                        return Err(Error::RealityViolation(format!("{} is not real", PARAM_NAMES[k])));
                    }
                }
            }
        }
        Ok(())
    }
}

impl FamilyParams<ParamPoly> {
    /// Fully symbolic parameters: six real indeterminates (para) or three
    /// conjugate pairs (Hermitian).
    pub fn symbolic(setting: ModelKind) -> (Self, Arc<PolyRing>) {
        let mut ring = PolyRing::new();
        for pair in PARAM_NAMES.chunks(2) {
            ring = match setting {
                ModelKind::Para => ring.real(pair[0]).real(pair[1]),
                ModelKind::Hermitian => ring.pair(pair[0], pair[1]),
            };
        }
        let ring = ring.build();
        let v = |k: usize| ring.var(PARAM_NAMES[k]);
        let p = FamilyParams { setting, eps1: v(0), eps1_t: v(1), alpha2: v(2), alpha2_t: v(3), alpha3: v(4), alpha3_t: v(5) };
        (p, ring)
    }
}

/// Informational label for generic members of the family.
pub fn generic_label(setting: ModelKind) -> &'static str {
    match setting {
        ModelKind::Para => "A₂,₂⊕A₂,₂",
        ModelKind::Hermitian => "A₄,₁₂",
    }
}

/// The family bracket in the Ψ frame of the setting's model.
pub fn family_algebra<S: Scalar>(p: &FamilyParams<S>) -> LieAlgebra4<S> {
    let z = S::zero;
    LieAlgebra4::from_brackets(
        p.setting,
        &[
            (0, 1, [p.eps1.clone(), z(), z(), z()]),
            (0, 3, [p.alpha3.clone(), z(), z(), z()]),
            (1, 2, [z(), z(), -p.alpha3_t.clone(), z()]),
            (1, 3, [p.alpha2.clone(), z(), -p.alpha2_t.clone(), z()]),
            (2, 3, [z(), z(), p.eps1_t.clone(), z()]),
        ],
    )
    .with_label(generic_label(p.setting))
}

/// `ρ_a = α̃₂ε₁Ψ¹∧Ψ² + α̃₂α₃Ψ¹∧Ψ⁴ − α₂α̃₃Ψ²∧Ψ³ + α₂ε̃₁Ψ³∧Ψ⁴`.
pub fn rho_a_closed_form<S: Scalar>(p: &FamilyParams<S>) -> KForm<S> {
    KForm::from_terms(
        2,
        &[
            (&[0, 1], p.alpha2_t.clone() * p.eps1.clone()),
            (&[0, 3], p.alpha2_t.clone() * p.alpha3.clone()),
            (&[1, 2], -(p.alpha2.clone() * p.alpha3_t.clone())),
            (&[2, 3], p.alpha2.clone() * p.eps1_t.clone()),
        ],
    )
}

/// Hermitian solver mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HermitianMode {
    /// Realize some element of the target's orbit.
    Orbit,
    /// Realize the target itself.
    #[default]
    ExactAlign,
}

/// Output of a solver, with its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar + serde::de::DeserializeOwned"))]
pub struct RealizationResult<S: Scalar + Serialize> {
    pub model: ModelKind,
    #[serde(serialize_with = "crate::io::serialize_algebra", deserialize_with = "crate::io::deserialize_algebra")]
    pub algebra: LieAlgebra4<S>,
    /// Family parameters before conjugation.
    pub params: FamilyParams<S>,
    /// `U` with `[x, y] = U⁻¹[Ux, Uy]_family`; identity when none was needed.
    pub conjugation: UnitaryElement<S>,
    pub predicted_rho_a: KForm<S>,
    pub target: KForm<S>,
    pub report: VerificationReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<HermitianMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_note: Option<String>,
    /// Set when an exact computation had to fall back to floating point.
    pub float_fallback: bool,
    /// Classification label for generic parameters (metadata only).
    pub label: String,
}

fn add_residual(report: &mut VerificationReport, name: &str, r: Residual) {
    report.pass &= r.pass;
    report.residuals.insert(name.to_string(), r);
}

fn form_residual<S: Scalar>(w: &KForm<S>, tol: f64) -> Residual {
    Residual::from_entries(w.coeffs(), |p| format!("Ψ^{}", crate::exterior::index_key(crate::exterior::monomials(w.degree())[p])), tol)
}

fn target_split<S: Scalar>(model: &ModelSpace<S>, target: &KForm<S>, tol: f64) -> Result<crate::model::TwoFormSplit<S>> {
    let split = model.split_two_form(target)?;
    if !split.omega.within(tol) {
        return Err(Error::OutsideSubspace(model.kind().target_space()));
    }
    Ok(split)
}

#[allow(clippy::too_many_arguments)]
fn certify<S: Scalar + Serialize>(
    model: &ModelSpace<S>,
    algebra: LieAlgebra4<S>,
    params: FamilyParams<S>,
    conjugation: UnitaryElement<S>,
    predicted: KForm<S>,
    target: &KForm<S>,
    mode: Option<HermitianMode>,
    tol: f64,
) -> RealizationResult<S> {
    let suite = check_suite(&algebra, model, tol);
    let mut report = suite.report;
    let rho_a = suite.pipeline.curvature.rho_a_form;
    add_residual(&mut report, "closed_form_vs_pipeline", form_residual(&(rho_a.clone() - predicted.clone()), tol));
    add_residual(&mut report, "reality", Residual::from_entries(&algebra.reality_defect().iter().flatten().flatten().cloned().collect::<Vec<_>>(), |p| format!("[{}{}{}]", p / 16 + 1, (p / 4) % 4 + 1, p % 4 + 1), tol));
    let orbit_note = match mode {
        Some(HermitianMode::Orbit) => {
            let (a, b) = (model.orbit_invariants(&rho_a), model.orbit_invariants(target));
            if let (Ok(a), Ok(b)) = (a, b) {
                add_residual(&mut report, "orbit_invariants", Residual::from_entries(&[a.x - b.x, a.y - b.y], |p| ["x", "y"][p].to_string(), tol));
            }
            Some("orbit mode: ρ_a has the target's orbit invariants (x, y); no alignment performed".to_string())
        }
        Some(HermitianMode::ExactAlign) => {
            add_residual(&mut report, "roundtrip", form_residual(&(rho_a - target.clone()), tol));
            Some(if conjugation.is_identity() {
                "exact_align mode: the family representative already equals the target".to_string()
            } else {
                "exact_align mode: bracket conjugated by an element of U(2) aligning ρ_a with the target".to_string()
            })
        }
        None => {
            add_residual(&mut report, "roundtrip", form_residual(&(rho_a - target.clone()), tol));
            None
        }
    };
    RealizationResult {
        model: model.kind(),
        label: generic_label(model.kind()).to_string(),
        algebra,
        params,
        conjugation,
        predicted_rho_a: predicted,
        target: target.clone(),
        report,
        mode,
        orbit_note,
        float_fallback: false,
    }
}

/// The zero target is realized by the abelian algebra (all parameters 0).
fn abelian_result<S: Scalar + Serialize>(model: &ModelSpace<S>, target: &KForm<S>, mode: Option<HermitianMode>, tol: f64) -> RealizationResult<S> {
    let params = FamilyParams::zero(model.kind());
    let algebra = LieAlgebra4::abelian(model.kind());
    let id = UnitaryElement::identity(model.kind());
    certify(model, algebra, params, id, KForm::zero(2), target, mode, tol)
}

/// Para solver: rotate the θ₁ component away, read the parameters off the
/// rotated target with `α₂ = α̃₂ = 1`, and conjugate the bracket back.
pub fn solve_para<S: Scalar + Serialize>(model: &ModelSpace<S>, target: &KForm<S>, tol: f64) -> Result<RealizationResult<S>> {
    if model.kind() != ModelKind::Para {
        return Err(Error::ModelMismatch("para"));
    }
    target_split(model, target, tol)?;
    if target.within(tol) {
        return Ok(abelian_result(model, target, None, tol));
    }
    let (u, normal) = model.normalize_theta1(target)?;
    let mu = |i: usize, j: usize| normal.coeff(&[i, j]).clone();
    let params = FamilyParams::para(mu(0, 1), mu(2, 3), S::one(), S::one(), mu(0, 3), -mu(1, 2));
    // U·Ξ = Ξ′ = ρ_a(family), so conjugating by U⁻¹ lands on Ξ
    let v = u.inverse()?;
    let algebra = family_algebra(&params).conjugate_by(v.matrix())?;
    let predicted = model.induced_action(&v, &rho_a_closed_form(&params))?;
    Ok(certify(model, algebra, params, v, predicted, target, None, tol))
}

fn nonnegative_sqrt<S: Scalar>(x: S, what: &str) -> Result<S> {
    let x = if S::is_exact() {
        x
    } else {
        let re = x.to_complex().map_or(0.0, |z| z.re.max(0.0));
        S::from_complex(num_complex::Complex64::new(re, 0.0)).expect("floating backend")
    };
    x.try_sqrt().ok_or_else(|| Error::NotRepresentable(format!("{what} is irrational; use the float backend")))
}

/// A unitary `U` with `U·source = target`: the identity when they already
/// agree, otherwise the floating-point alignment witness.
pub fn align<S: Scalar>(model: &ModelSpace<S>, source: &KForm<S>, target: &KForm<S>, tol: f64) -> Result<UnitaryElement<S>> {
    if (source.clone() - target.clone()).within(tol) {
        return Ok(UnitaryElement::identity(model.kind()));
    }
    let to_float = |w: &KForm<S>| -> Option<KForm<FloatComplex>> {
        let coeffs = w.coeffs().iter().map(|c| c.to_complex().map(FloatComplex)).collect::<Option<Vec<_>>>()?;
        KForm::from_coeffs(w.degree(), coeffs).ok()
    };
    let unrepresentable = || Error::NotRepresentable("aligning rotation is irrational; use the float backend".into());
    let (fs, ft) = (to_float(source).ok_or_else(unrepresentable)?, to_float(target).ok_or_else(unrepresentable)?);
    let fmodel = ModelSpace::<FloatComplex>::build(model.kind());
    let u = fmodel.align_hermitian(&fs, &ft)?;
    let mut m = crate::matrix::Matrix4::<S>::zero();
    for i in 0..4 {
        for j in 0..4 {
            m.0[i][j] = S::from_complex(u.matrix.0[i][j].0).ok_or_else(unrepresentable)?;
        }
    }
    Ok(UnitaryElement::from_matrix(model.kind(), m))
}

/// Hermitian solver: `α₂ = 1`, `α₃ = √(x/2)`, `ε₁ = √(y/2)` for the orbit
/// invariants `(x, y)` of the target, then (in `ExactAlign` mode) conjugation
/// by an aligning unitary element.
pub fn solve_hermitian<S: Scalar + Serialize>(
    model: &ModelSpace<S>,
    target: &KForm<S>,
    mode: HermitianMode,
    tol: f64,
) -> Result<RealizationResult<S>> {
    if model.kind() != ModelKind::Hermitian {
        return Err(Error::ModelMismatch("hermitian"));
    }
    target_split(model, target, tol)?;
    if target.within(tol) {
        return Ok(abelian_result(model, target, Some(mode), tol));
    }
    let inv = model.orbit_invariants(target)?;
    let half = S::from_ratio(1, 2);
    let alpha3 = nonnegative_sqrt(inv.x * half.clone(), "√(x/2)")?;
    let eps1 = nonnegative_sqrt(inv.y * half, "√(y/2)")?;
    let params = FamilyParams::hermitian(eps1, S::one(), alpha3);
    let family = family_algebra(&params);
    let rho = rho_a_closed_form(&params);
    match mode {
        HermitianMode::Orbit => {
            let id = UnitaryElement::identity(ModelKind::Hermitian);
            Ok(certify(model, family, params, id, rho, target, Some(mode), tol))
        }
        HermitianMode::ExactAlign => {
            let u = align(model, &rho, target, tol)?;
            let algebra = family.conjugate_by(u.matrix())?;
            let predicted = model.induced_action(&u, &rho)?;
            Ok(certify(model, algebra, params, u, predicted, target, Some(mode), tol))
        }
    }
}

pub fn solve<S: Scalar + Serialize>(model: &ModelSpace<S>, target: &KForm<S>, mode: HermitianMode, tol: f64) -> Result<RealizationResult<S>> {
    match model.kind() {
        ModelKind::Para => solve_para(model, target, tol),
        ModelKind::Hermitian => solve_hermitian(model, target, mode, tol),
    }
}

/// Outcome of rerunning the pipeline on a stored result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTrip {
    pub pass: bool,
    pub residual: Residual,
    pub report: VerificationReport,
}

/// Recomputes `ρ_a` of `r.algebra` from scratch and compares it with the
/// target (or, in orbit mode, compares orbit invariants).
pub fn verify_roundtrip<S: Scalar + Serialize>(r: &RealizationResult<S>, tol: f64) -> RoundTrip {
    let model = ModelSpace::<S>::build(r.model);
    let suite = check_suite(&r.algebra, &model, tol);
    let rho = suite.pipeline.curvature.rho_a_form;
    let residual = match r.mode {
        Some(HermitianMode::Orbit) => match (model.orbit_invariants(&rho), model.orbit_invariants(&r.target)) {
            (Ok(a), Ok(b)) => Residual::from_entries(&[a.x - b.x, a.y - b.y], |p| ["x", "y"][p].to_string(), tol),
            _ => Residual { max_abs: f64::INFINITY, exact_zero: Some(false), witness: Some("ρ_a is not real".into()), pass: false },
        },
        _ => form_residual(&(rho - r.target.clone()), tol),
    };
    RoundTrip { pass: residual.pass && suite.report.pass, residual, report: suite.report }
}

/// A result from either backend.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum Realization {
    Exact(RealizationResult<GaussianRational>),
    Float(RealizationResult<FloatComplex>),
}

impl Realization {
    pub fn report(&self) -> &VerificationReport {
        match self {
            Realization::Exact(r) => &r.report,
            Realization::Float(r) => &r.report,
        }
    }
}

/// Solves exactly when every parameter is rational, otherwise repeats the
/// computation in floating point and sets `float_fallback`.
pub fn solve_with_fallback(kind: ModelKind, target: &KForm<GaussianRational>, mode: HermitianMode, tol: f64) -> Result<Realization> {
    let exact = ModelSpace::<GaussianRational>::build(kind);
    match solve(&exact, target, mode, tol) {
        Ok(r) => Ok(Realization::Exact(r)),
        Err(Error::NotRepresentable(_)) => {
            let float = ModelSpace::<FloatComplex>::build(kind);
            let target = target.map_into(FloatComplex::from_gaussian);
            let mut r = solve(&float, &target, mode, tol)?;
            r.float_fallback = true;
            Ok(Realization::Float(r))
        }
        Err(e) => Err(e),
    }
}

/// Named parameter assignment for evaluating symbolic family data.
pub fn assignment<S: Scalar>(p: &FamilyParams<S>) -> BTreeMap<String, S> {
    PARAM_NAMES.iter().zip(p.values()).map(|(n, v)| (n.to_string(), v.clone())).collect()
}
