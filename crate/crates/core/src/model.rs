//! The Hermitian (signature (0,4)) and para-Hermitian (signature (2,2))
//! model spaces.
//!
//! Both models are expressed in the hyperbolic frame `Ψ₁..Ψ₄` with
//! `⟨Ψ₁,Ψ₃⟩ = ⟨Ψ₂,Ψ₄⟩ = 1`. For the para model `Ψᵢ = eᵢ`; for the Hermitian
//! model `(Ψ₁, Ψ₂, Ψ₃, Ψ₄) = (Z₁, Z₂, Z̄₁, Z̄₂)` in the complexification, and
//! the real orthonormal-up-to-scale frame `e₁..e₄` is kept alongside.
//!
//! Endomorphisms act on forms by pullback, `(Tω)(x, y) = ω(Tx, Ty)`. In
//! particular `J` acts on covectors by `(Jω)(x) = ω(Jx)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::engine::LieAlgebra4;
use crate::error::{Error, Result};
use crate::exterior::{Frame, KForm};
use crate::matrix::{rank, Matrix4};
use crate::scalar::{FloatComplex, Scalar};

/// Tolerance used by floating-backend domain checks.
pub const FLOAT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Hermitian,
    Para,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Hermitian => "hermitian",
            ModelKind::Para => "para",
        }
    }

    /// `J² = sign · Id`.
    pub fn j_square_sign(self) -> i64 {
        match self {
            ModelKind::Hermitian => -1,
            ModelKind::Para => 1,
        }
    }

    /// Name of the subspace `Λ²₀,∓ ⊕ Λ²±` that realization targets live in.
    pub fn target_space(self) -> &'static str {
        match self {
            ModelKind::Hermitian => "Λ²₀,₊⊕Λ²₋",
            ModelKind::Para => "Λ²₀,₋⊕Λ²₊",
        }
    }
}

/// A model `(V, ⟨·,·⟩, J)` with its θ-basis.
#[derive(Debug, Clone)]
pub struct ModelSpace<S: Scalar> {
    kind: ModelKind,
    frame: Frame<S>,
    j: Matrix4<S>,
    omega: KForm<S>,
    theta: [KForm<S>; 5],
    theta_norms: [S; 5],
    omega_norm: S,
    /// `conj(Ψ^i) = Σ_j real_structure[i][j] Ψ^j`.
    real_structure: Matrix4<S>,
    /// Hermitian only: the real frame `e₁..e₄` and the substitution
    /// `Ψ^i = Σ_j to_real[i][j] e^j`.
    real_frame: Option<Frame<S>>,
    to_real: Option<Matrix4<S>>,
}

fn matrix_within<S: Scalar>(m: &Matrix4<S>, tol: f64) -> bool {
    m.0.iter().flatten().all(|x| x.within(tol))
}

fn psi<S: Scalar>(idx: &[usize]) -> KForm<S> {
    KForm::monomial(idx)
}

impl<S: Scalar> ModelSpace<S> {
    pub fn build(kind: ModelKind) -> Self {
        let model = match kind {
            ModelKind::Hermitian => Self::hermitian(),
            ModelKind::Para => Self::para(),
        };
        if let Err(msg) = model.verify() {
            panic!("model space invariant violated: {msg}");
        }
        model
    }

    fn para() -> Self {
        let frame = Frame::hyperbolic();
        let one = S::one;
        let j = Matrix4::diagonal([one(), one(), -one(), -one()]);
        let omega = -(psi(&[0, 2]) + psi(&[1, 3]));
        let theta = [
            psi(&[0, 2]) - psi(&[1, 3]),
            psi(&[0, 3]) + psi(&[1, 2]),
            psi(&[0, 3]) - psi(&[1, 2]),
            psi(&[0, 1]) + psi(&[2, 3]),
            psi(&[0, 1]) - psi(&[2, 3]),
        ];
        Self::assemble(ModelKind::Para, frame, j, omega, theta, Matrix4::identity(), None, None)
    }

    fn hermitian() -> Self {
        let i = S::i();
        let two = S::from_i64(2);
        let half = S::from_ratio(1, 2);
        let zero = S::zero;

        // ⟨e_a, e_a⟩ = 2, J e₁ = e₂, J e₃ = e₄.
        let real_frame = Frame::new(Matrix4::diagonal(std::array::from_fn(|_| two.clone())), [0, 1, 2, 3], "e", "e")
            .expect("real frame");
        let mut j_real = Matrix4::zero();
        j_real.0[1][0] = S::one();
        j_real.0[0][1] = -S::one();
        j_real.0[3][2] = S::one();
        j_real.0[2][3] = -S::one();

        // Columns: Z₁ = ½(e₁ − ie₂), Z₂ = ½(e₃ − ie₄), Z̄₁, Z̄₂ in e-coordinates.
        let hi = half.clone() * i.clone();
        let q = Matrix4([
            [half.clone(), zero(), half.clone(), zero()],
            [-hi.clone(), zero(), hi.clone(), zero()],
            [zero(), half.clone(), zero(), half.clone()],
            [zero(), -hi.clone(), zero(), hi.clone()],
        ]);
        let p = q.inverse().expect("change of basis is invertible");
        let metric = q.transpose().mul(real_frame.metric()).mul(&q);
        let j = p.mul(&j_real).mul(&q);
        let frame = Frame::new(metric, [0, 2, 1, 3], "Ψ", "Ψ").expect("Z frame");

        // Z^1 = Ψ^1, Z^2 = Ψ^2, Z̄^1 = Ψ^3, Z̄^2 = Ψ^4
        let omega = (psi(&[0, 2]) + psi(&[1, 3])).scale(&-i.clone());
        let theta = [
            (psi(&[0, 2]) - psi(&[1, 3])).scale(&i),
            psi(&[0, 3]) + psi(&[2, 1]),
            (psi(&[0, 3]) - psi(&[2, 1])).scale(&i),
            psi(&[0, 1]) + psi(&[2, 3]),
            (psi(&[0, 1]) - psi(&[2, 3])).scale(&i),
        ];
        let swap = Matrix4::from_fn(|a, b| if (a + 2) % 4 == b { S::one() } else { S::zero() });
        Self::assemble(ModelKind::Hermitian, frame, j, omega, theta, swap, Some(real_frame), Some(p))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: ModelKind,
        frame: Frame<S>,
        j: Matrix4<S>,
        omega: KForm<S>,
        theta: [KForm<S>; 5],
        real_structure: Matrix4<S>,
        real_frame: Option<Frame<S>>,
        to_real: Option<Matrix4<S>>,
    ) -> Self {
        let theta_norms = std::array::from_fn(|k| frame.form_inner(&theta[k], &theta[k]).expect("degree 2"));
        let omega_norm = frame.form_inner(&omega, &omega).expect("degree 2");
        ModelSpace { kind, frame, j, omega, theta, theta_norms, omega_norm, real_structure, real_frame, to_real }
    }

    /// Checks every structural invariant exactly (or to 1e-12 in floating
    /// mode). Run once at construction.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let tol = 1e-12;
        let near = |a: &S, b: &S| (a.clone() - b.clone()).within(tol);
        let g = self.frame.metric();
        let sign = S::from_i64(self.kind.j_square_sign());
        let j2 = self.j.mul(&self.j);
        if !matrix_within(&j2.sub(&Matrix4::identity().scale(&sign)), tol) {
            return Err("J² ≠ ∓Id".into());
        }
        let trace = (0..4).fold(S::zero(), |a, k| a + self.j.0[k][k].clone());
        if !trace.within(tol) {
            return Err("trace J ≠ 0".into());
        }
        // J*g = ±g: Hermitian preserves g, para negates it.
        let jg = self.j.transpose().mul(g).mul(&self.j);
        let expected = g.scale(&-sign.clone());
        if !matrix_within(&jg.sub(&expected), tol) {
            return Err("J is not (para-)Hermitian".into());
        }
        let omega_def = KForm::from_coeffs(
            2,
            crate::exterior::monomials(2)
                .iter()
                .map(|ab| (0..4).fold(S::zero(), |acc, k| acc + g.0[ab[0]][k].clone() * self.j.0[k][ab[1]].clone()))
                .collect(),
        )
        .expect("degree 2");
        if !(omega_def - self.omega.clone()).within(tol) {
            return Err("Ω(x, y) ≠ g(x, Jy)".into());
        }
        let expected_norms: [i64; 5] = match self.kind {
            ModelKind::Hermitian => [2, 2, 2, 2, 2],
            ModelKind::Para => [-2, -2, 2, 2, -2],
        };
        for k in 0..5 {
            if !near(&self.theta_norms[k], &S::from_i64(expected_norms[k])) {
                return Err(format!("⟨θ{},θ{}⟩ = {}", k + 1, k + 1, self.theta_norms[k]));
            }
            for l in 0..k {
                let ip = self.frame.form_inner(&self.theta[k], &self.theta[l]).expect("degree 2");
                if !ip.within(tol) {
                    return Err(format!("θ{} not ⟂ θ{}", k + 1, l + 1));
                }
            }
            let ip = self.frame.form_inner(&self.theta[k], &self.omega).expect("degree 2");
            if !ip.within(tol) {
                return Err(format!("θ{} not ⟂ Ω", k + 1));
            }
            // J acts by ∓1 on Λ²₀,∓ (k < 3) and ±1 on Λ²± (k ≥ 3).
            let eig = if (k < 3) == (self.kind == ModelKind::Para) { -S::one() } else { S::one() };
            if !(self.act_on_form(&self.theta[k]) - self.theta[k].scale(&eig)).within(tol) {
                return Err(format!("θ{} has the wrong J-eigenvalue", k + 1));
            }
            if !(self.conjugate_form(&self.theta[k]) - self.theta[k].clone()).within(tol) {
                return Err(format!("θ{} is not real", k + 1));
            }
        }
        if self.kind == ModelKind::Hermitian {
            let hyper = Frame::<S>::hyperbolic();
            if !matrix_within(&self.frame.metric().sub(hyper.metric()), tol) {
                return Err("⟨Z_a, Z̄_b⟩ ≠ δ_ab".into());
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn frame(&self) -> &Frame<S> {
        &self.frame
    }

    /// `J` on vectors: `JΨ_j = Σ_i j[i][j] Ψ_i`.
    pub fn j(&self) -> &Matrix4<S> {
        &self.j
    }

    /// Kähler form `Ω(x, y) = g(x, Jy)`.
    pub fn omega(&self) -> &KForm<S> {
        &self.omega
    }

    pub fn theta(&self) -> &[KForm<S>; 5] {
        &self.theta
    }

    pub fn theta_norms(&self) -> &[S; 5] {
        &self.theta_norms
    }

    pub fn real_frame(&self) -> Option<&Frame<S>> {
        self.real_frame.as_ref()
    }

    /// `J` acting on a form of any degree by pullback.
    pub fn act_on_form(&self, w: &KForm<S>) -> KForm<S> {
        w.pullback(&self.j)
    }

    /// Complex conjugation of a form, relative to the real structure of `V`.
    pub fn conjugate_form(&self, w: &KForm<S>) -> KForm<S> {
        w.conj_coeffs().pullback(&self.real_structure)
    }

    /// Conjugation defect `max |conj(w) − w|`; zero for real forms.
    pub fn reality_defect(&self, w: &KForm<S>) -> KForm<S> {
        self.conjugate_form(w) - w.clone()
    }

    pub fn is_real(&self, w: &KForm<S>, tol: f64) -> bool {
        self.reality_defect(w).within(tol)
    }

    /// Hermitian only: re-express a Ψ-form in the real coframe `e^i`.
    pub fn to_real_basis(&self, w: &KForm<S>) -> Option<KForm<S>> {
        self.to_real.as_ref().map(|p| w.pullback(p))
    }

    /// Hermitian only: inverse of [`ModelSpace::to_real_basis`].
    pub fn from_real_basis(&self, w: &KForm<S>) -> Option<KForm<S>> {
        self.to_real.as_ref().map(|p| w.pullback(&p.inverse().expect("invertible")))
    }

    /// Form in `Λ²` with the given θ-coordinates and Ω-coefficient.
    pub fn assemble_two_form(&self, theta: &[S; 5], omega: &S) -> KForm<S> {
        self.theta
            .iter()
            .zip(theta)
            .fold(self.omega.scale(omega), |acc, (t, c)| acc + t.scale(c))
    }

    /// Coordinates of a 2-form along `θ₁..θ₅` and `Ω`.
    pub fn split_two_form(&self, xi: &KForm<S>) -> Result<TwoFormSplit<S>> {
        if xi.degree() != 2 {
            return Err(Error::DegreeMismatch(xi.degree(), 2));
        }
        if self.kind == ModelKind::Hermitian && !self.is_real(xi, FLOAT_TOL) {
            return Err(Error::RealityViolation("2-form is not real".into()));
        }
        let coord = |basis: &KForm<S>, norm: &S| -> Result<S> { self.frame.form_inner(xi, basis)?.div(norm) };
        let mut theta: [S; 5] = std::array::from_fn(|_| S::zero());
        for k in 0..5 {
            theta[k] = coord(&self.theta[k], &self.theta_norms[k])?;
        }
        let omega = coord(&self.omega, &self.omega_norm)?;
        Ok(TwoFormSplit { theta, omega })
    }

    /// `(|ξ₀,₊|², |ξ₋|²)`; Hermitian model only.
    pub fn orbit_invariants(&self, xi: &KForm<S>) -> Result<OrbitInvariants<S>> {
        if self.kind == ModelKind::Para {
            return Err(Error::ParaOrbitInvariants);
        }
        let split = self.split_two_form(xi)?;
        let zero = split.zero_part(self);
        let pm = split.pm_part(self);
        Ok(OrbitInvariants { x: self.frame.form_inner(&zero, &zero)?, y: self.frame.form_inner(&pm, &pm)? })
    }

    /// Verifies `T*g = g` and `TJ = JT`.
    pub fn check_unitary(&self, u: &UnitaryElement<S>) -> Result<()> {
        if u.kind != self.kind {
            return Err(Error::ModelMismatch(self.kind.name()));
        }
        let t = &u.matrix;
        let scale = 1.0f64.max(t.max_magnitude().powi(2));
        let tol = FLOAT_TOL * scale;
        let ok = |m: Matrix4<S>| matrix_within(&m, tol);
        let g = self.frame.metric();
        if !ok(t.transpose().mul(g).mul(t).sub(g)) || !ok(t.mul(&self.j).sub(&self.j.mul(t))) {
            return Err(Error::NotUnitary);
        }
        Ok(())
    }

    /// Pullback action `ξ ↦ T*ξ` of a unitary element on forms.
    pub fn induced_action(&self, u: &UnitaryElement<S>, xi: &KForm<S>) -> Result<KForm<S>> {
        self.check_unitary(u)?;
        Ok(xi.pullback(&u.matrix))
    }

    /// Para model: a unitary `U` such that `U·ξ` has no θ₁ component.
    ///
    /// `U` acts on `(e₁, e₂)` by a rotation, which turns the `(θ₁, θ₂)` plane
    /// by twice the angle and fixes `θ₃, θ₄, θ₅`. Exact backends succeed when
    /// the rotation is rational; otherwise they report `NotRepresentable`.
    pub fn normalize_theta1(&self, xi: &KForm<S>) -> Result<(UnitaryElement<S>, KForm<S>)> {
        if self.kind != ModelKind::Para {
            return Err(Error::ModelMismatch("para"));
        }
        let split = self.split_two_form(xi)?;
        let (c1, c2) = (split.theta[0].clone(), split.theta[1].clone());
        if c1.is_zero() {
            return Ok((UnitaryElement::identity(self.kind), xi.clone()));
        }
        let irrational = || Error::NotRepresentable("θ₁-normalising rotation is irrational; use the float backend".into());
        let r = (c1.clone() * c1.clone() + c2.clone() * c2.clone()).try_sqrt().ok_or_else(irrational)?;
        let cos = c2.div(&r)?;
        let sin = c1.div(&r)?;
        // half-angle rotation [[a, b], [−b, a]] with a² − b² = cos, 2ab = sin
        let one_plus = S::one() + cos;
        let k = S::from_ratio(1, 2).div(&one_plus)?.try_sqrt().ok_or_else(irrational)?;
        let a = k.clone() * one_plus;
        let b = k * sin;
        let u = UnitaryElement::para([[a.clone(), b.clone()], [-b, a]])?;
        let rotated = self.induced_action(&u, xi)?;
        Ok((u, rotated))
    }

    /// Splits a symmetric 2-tensor along `𝟙 ⊕ S²₀,∓ ⊕ S²±`.
    pub fn split_sym_two_tensor(&self, s: &SymTwoTensor<S>) -> Result<SymTwoSplit<S>> {
        let g = self.frame.metric();
        let gi = self.frame.inverse_metric();
        let inner = |a: &Matrix4<S>, b: &Matrix4<S>| -> S {
            let mut acc = S::zero();
            for i in 0..4 {
                for j in 0..4 {
                    for p in 0..4 {
                        for q in 0..4 {
                            let w = gi.0[i][p].clone() * gi.0[j][q].clone();
                            if !w.is_zero() {
                                acc = acc + w * a.0[i][j].clone() * b.0[p][q].clone();
                            }
                        }
                    }
                }
            }
            acc
        };
        let trace = inner(&s.0, g).div(&inner(g, g))?;
        let rest = s.0.sub(&g.scale(&trace));
        let j_rest = self.j.transpose().mul(&rest).mul(&self.j);
        // J acts on g by σ = +1 (Hermitian) or −1 (para)
        let sigma = S::from_i64(-self.kind.j_square_sign());
        let half = S::from_ratio(1, 2);
        let s0 = Matrix4::from_fn(|i, j| half.clone() * (rest.0[i][j].clone() + sigma.clone() * j_rest.0[i][j].clone()));
        let spm = Matrix4::from_fn(|i, j| half.clone() * (rest.0[i][j].clone() - sigma.clone() * j_rest.0[i][j].clone()));
        Ok(SymTwoSplit { trace_part: trace, s0_part: SymTwoTensor(s0), spm_part: SymTwoTensor(spm) })
    }

    /// `J` acting on a symmetric 2-tensor, `(Js)(x, y) = s(Jx, Jy)`.
    pub fn act_on_sym(&self, s: &SymTwoTensor<S>) -> SymTwoTensor<S> {
        SymTwoTensor(self.j.transpose().mul(&s.0).mul(&self.j))
    }

    /// Span criteria for integrability of `J`: `[Ψ₁,Ψ₂] ∈ span{Ψ₁,Ψ₂}` and
    /// `[Ψ₃,Ψ₄] ∈ span{Ψ₃,Ψ₄}`. For the Hermitian model these read
    /// `[Z₁,Z₂] ∈ span{Z₁,Z₂}` and its conjugate, which is automatic for
    /// brackets coming from a real Lie algebra.
    pub fn integrability_predicates(&self, algebra: &LieAlgebra4<S>) -> bool {
        let c = algebra.constants();
        let ok = |x: &S| x.within(FLOAT_TOL);
        ok(&c[0][1][2]) && ok(&c[0][1][3]) && ok(&c[2][3][0]) && ok(&c[2][3][1])
    }

    /// Ranks of the projections of `Λ²` onto `(χ, Λ²₀,∓, Λ²±)`, with each
    /// projector built from its defining conditions (J-eigenvalue and
    /// Ω-orthogonality) rather than from the θ-basis.
    pub fn projection_ranks(&self) -> [usize; 3] {
        let j_omega = self.act_on_form(&self.omega);
        let lambda = if j_omega == self.omega { S::one() } else { -S::one() };
        let half = S::from_ratio(1, 2);
        let mut images: [Vec<Vec<S>>; 3] = Default::default();
        for &mono in crate::exterior::monomials(2) {
            let xi = KForm::<S>::monomial(mono);
            let eig = (xi.clone() + self.act_on_form(&xi).scale(&lambda)).scale(&half);
            let chi = self
                .omega
                .scale(&self.frame.form_inner(&xi, &self.omega).expect("deg 2").div(&self.omega_norm).expect("Ω non-null"));
            let zero = eig.clone() - chi.clone();
            let pm = xi - eig;
            images[0].push(chi.coeffs().to_vec());
            images[1].push(zero.coeffs().to_vec());
            images[2].push(pm.coeffs().to_vec());
        }
        [rank(&images[0]), rank(&images[1]), rank(&images[2])]
    }
}

/// θ- and Ω-coordinates of a 2-form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoFormSplit<S> {
    pub theta: [S; 5],
    pub omega: S,
}

impl<S: Scalar> TwoFormSplit<S> {
    /// The χ-line component `ω·Ω`.
    pub fn chi_part(&self, m: &ModelSpace<S>) -> KForm<S> {
        m.omega.scale(&self.omega)
    }

    /// Component in `Λ²₀,∓` (θ₁, θ₂, θ₃).
    pub fn zero_part(&self, m: &ModelSpace<S>) -> KForm<S> {
        (0..3).fold(KForm::zero(2), |acc, k| acc + m.theta[k].scale(&self.theta[k]))
    }

    /// Component in `Λ²±` (θ₄, θ₅).
    pub fn pm_part(&self, m: &ModelSpace<S>) -> KForm<S> {
        (3..5).fold(KForm::zero(2), |acc, k| acc + m.theta[k].scale(&self.theta[k]))
    }

    pub fn reassemble(&self, m: &ModelSpace<S>) -> KForm<S> {
        m.assemble_two_form(&self.theta, &self.omega)
    }
}

/// `x = |ξ₀,₊|²`, `y = |ξ₋|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitInvariants<S> {
    pub x: S,
    pub y: S,
}

/// Element of the structure group `𝒰 = {T ∈ O : TJ = JT}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryElement<S> {
    pub kind: ModelKind,
    /// Matrix in the Ψ frame, `TΨ_j = Σ_i matrix[i][j] Ψ_i`.
    pub matrix: Matrix4<S>,
}

impl<S: Scalar> UnitaryElement<S> {
    pub fn identity(kind: ModelKind) -> Self {
        UnitaryElement { kind, matrix: Matrix4::identity() }
    }

    /// Hermitian: a complex 2×2 block `A` on `(Z₁, Z₂)`, acting as `Ā` on
    /// `(Z̄₁, Z̄₂)`. Unitarity of `A` is checked when the element is used.
    pub fn hermitian(a: [[S; 2]; 2]) -> Self {
        let mut m = Matrix4::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a[i][j].clone();
                m.0[i + 2][j + 2] = a[i][j].conj();
            }
        }
        UnitaryElement { kind: ModelKind::Hermitian, matrix: m }
    }

    /// Para: an invertible real 2×2 block `A` on `(e₁, e₂)`, acting as
    /// `A^{−T}` on `(e₃, e₄)`.
    pub fn para(a: [[S; 2]; 2]) -> Result<Self> {
        let det = a[0][0].clone() * a[1][1].clone() - a[0][1].clone() * a[1][0].clone();
        let inv_det = det.inv()?;
        // A^{-T} = (1/det) [[d, −c], [−b, a]]
        let inv_t = [
            [a[1][1].clone() * inv_det.clone(), -a[1][0].clone() * inv_det.clone()],
            [-a[0][1].clone() * inv_det.clone(), a[0][0].clone() * inv_det],
        ];
        let mut m = Matrix4::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a[i][j].clone();
                m.0[i + 2][j + 2] = inv_t[i][j].clone();
            }
        }
        Ok(UnitaryElement { kind: ModelKind::Para, matrix: m })
    }

    /// Wraps an arbitrary matrix; membership is checked on use.
    pub fn from_matrix(kind: ModelKind, matrix: Matrix4<S>) -> Self {
        UnitaryElement { kind, matrix }
    }

    pub fn matrix(&self) -> &Matrix4<S> {
        &self.matrix
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == Matrix4::identity()
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(UnitaryElement { kind: self.kind, matrix: self.matrix.inverse()? })
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        UnitaryElement { kind: self.kind, matrix: self.matrix.mul(&other.matrix) }
    }
}

/// Symmetric bilinear form, `s[i][j] = s(Ψᵢ, Ψⱼ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymTwoTensor<S>(pub Matrix4<S>);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymTwoSplit<S> {
    /// Coefficient of `g`.
    pub trace_part: S,
    /// Component in `S²₀,∓` (J-eigenvalue shared with `g`, trace-free).
    pub s0_part: SymTwoTensor<S>,
    /// Component in `S²±`.
    pub spm_part: SymTwoTensor<S>,
}

impl<S: Scalar> SymTwoSplit<S> {
    pub fn reassemble(&self, m: &ModelSpace<S>) -> SymTwoTensor<S> {
        let g = m.frame().metric().scale(&self.trace_part);
        SymTwoTensor(Matrix4::from_fn(|i, j| {
            g.0[i][j].clone() + self.s0_part.0 .0[i][j].clone() + self.spm_part.0 .0[i][j].clone()
        }))
    }
}

type C = FloatComplex;

fn su2_generators() -> [[[C; 2]; 2]; 3] {
    let z = C::zero();
    let i = C::new(0.0, 1.0);
    let one = C::one();
    [[[i, z], [z, -i]], [[z, one], [-one, z]], [[z, i], [i, z]]]
}

fn embed_hermitian_block(a: &[[C; 2]; 2]) -> Matrix4<C> {
    UnitaryElement::hermitian(*a).matrix
}

fn real3(split: &TwoFormSplit<C>) -> [f64; 3] {
    [split.theta[0].re(), split.theta[1].re(), split.theta[2].re()]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| x * y).sum()
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

impl ModelSpace<C> {
    /// Axial vectors of the rotations that the su(2) generators induce on
    /// `Λ²₀,₊` in θ-coordinates.
    fn su2_axial_images(&self) -> [[f64; 3]; 3] {
        su2_generators().map(|x| {
            let x4 = embed_hermitian_block(&x);
            let mut m = [[0.0; 3]; 3];
            for (col, theta) in self.theta[..3].iter().enumerate() {
                let image = self.split_two_form(&theta.derivation(&x4)).expect("real");
                for (row, v) in real3(&image).iter().enumerate() {
                    m[row][col] = *v;
                }
            }
            [m[2][1], m[0][2], m[1][0]]
        })
    }

    /// SU(2) element whose induced action rotates `Λ²₀,₊` about `axis` by
    /// `angle` (right-handed, in θ-coordinates).
    fn su2_rotation(&self, axis: [f64; 3], angle: f64) -> [[C; 2]; 2] {
        let g = self.su2_axial_images();
        let w: Vec<Vec<C>> = (0..3).map(|r| (0..3).map(|c| C::from(g[c][r])).collect()).collect();
        let rhs: Vec<C> = axis.iter().map(|a| C::from(a * angle)).collect();
        let coeffs = crate::matrix::solve(&w, &rhs).expect("su(2) → so(3) is an isomorphism");
        let gens = su2_generators();
        let mut x = [[C::zero(); 2]; 2];
        for (k, a) in coeffs.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    x[i][j] = x[i][j] + gens[k][i][j] * *a;
                }
            }
        }
        // X is traceless skew-Hermitian, X² = −det(X)·I
        let lambda = (x[0][0] * x[1][1] - x[0][1] * x[1][0]).re().max(0.0).sqrt();
        let (c, s) = (lambda.cos(), if lambda < 1e-300 { 1.0 } else { lambda.sin() / lambda });
        let mut a = [[C::zero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { C::from(c) } else { C::zero() };
                a[i][j] = id + x[i][j] * C::from(s);
            }
        }
        a
    }

    /// Hermitian model: a unitary `U` with `U·source = target`, for two real
    /// 2-forms in `Λ²₀,₊ ⊕ Λ²₋` with equal orbit invariants.
    ///
    /// The `Λ²₀,₊` parts are aligned by an SU(2) element (axis-angle through
    /// the covering map onto SO(3)); the `Λ²₋` parts by a central phase
    /// `e^{iτ}`, which acts trivially on `Λ²₀,₊` and by `e^{2iτ}` on `Λ²₋`.
    pub fn align_hermitian(&self, source: &KForm<C>, target: &KForm<C>) -> Result<UnitaryElement<C>> {
        if self.kind != ModelKind::Hermitian {
            return Err(Error::ModelMismatch("hermitian"));
        }
        let si = self.orbit_invariants(source)?;
        let ti = self.orbit_invariants(target)?;
        let (xs, ys, xt, yt) = (si.x.re(), si.y.re(), ti.x.re(), ti.y.re());
        let tol = 1e-9 * 1f64.max(xs.abs().max(ys.abs()));
        if (xs - xt).abs() > tol || (ys - yt).abs() > tol {
            return Err(Error::NotSameOrbit(xs, ys, xt, yt));
        }
        let ss = self.split_two_form(source)?;
        let ts = self.split_two_form(target)?;
        let (s, t) = (real3(&ss), real3(&ts));
        let (ns, nt) = (norm(s), norm(t));

        let mut block = [[C::one(), C::zero()], [C::zero(), C::one()]];
        if ns > 1e-12 && nt > 1e-12 {
            let (su, tu) = (s.map(|v| v / ns), t.map(|v| v / nt));
            let axis_raw = cross(su, tu);
            let sin = norm(axis_raw);
            let cos = dot(su, tu);
            let (axis, angle) = if sin > 1e-12 {
                (axis_raw.map(|v| v / sin), sin.atan2(cos))
            } else if cos > 0.0 {
                ([1.0, 0.0, 0.0], 0.0)
            } else {
                // antipodal: any axis perpendicular to s
                let k = (0..3).min_by(|&a, &b| su[a].abs().total_cmp(&su[b].abs())).expect("3 axes");
                let mut e = [0.0; 3];
                e[k] = 1.0;
                let p = cross(su, e);
                (p.map(|v| v / norm(p)), PI)
            };
            if angle != 0.0 {
                block = self.su2_rotation(axis, angle);
            }
        }
        let b = UnitaryElement::hermitian(block);
        let moved = self.split_two_form(&self.induced_action(&b, source)?)?;
        // Ψ¹∧Ψ² coefficient of the Λ²₋ part is c₄ + i c₅
        let ws = num_complex::Complex64::new(moved.theta[3].re(), moved.theta[4].re());
        let wt = num_complex::Complex64::new(ts.theta[3].re(), ts.theta[4].re());
        let u = if ws.norm() > 1e-12 && wt.norm() > 1e-12 {
            let tau = (wt / ws).arg() / 2.0;
            let phase = C::new(tau.cos(), tau.sin());
            let p = UnitaryElement::hermitian([[phase, C::zero()], [C::zero(), phase]]);
            b.compose(&p)
        } else {
            b
        };
        Ok(u)
    }
}

#[cfg(test)]
mod tests;
