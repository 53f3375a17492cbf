//! From structure constants to curvature.
//!
//! Everything is left-invariant, so directional derivatives of invariant
//! tensors vanish and all calculus reduces to algebra on the structure
//! constants `c_{ij}^k`, where `[Ψ_i, Ψ_j] = Σ_k c_{ij}^k Ψ_k`.
//!
//! Conventions:
//!
//! - `dψ(x, y) = −ψ([x, y])`, extended as an antiderivation.
//! - `δ = −⋆d⋆` in every degree.
//! - `𝓡(x, y)z = (∇ₓ∇_y − ∇_y∇ₓ − ∇_{[x,y]})z`, `R(x, y, z, w) = g(𝓡(x, y)z, w)`,
//!   `ρ(x, y) = Tr{z ↦ 𝓡(z, x)y}`, `ρ_a(x, y) = ½(ρ(x, y) − ρ(y, x))`.
//! - `φ = +½J₊δΩ` (para) and `φ = −½J₋δΩ` (Hermitian).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{monomials, Frame, KForm};
use crate::matrix::Matrix4;
use crate::model::{ModelKind, ModelSpace};
use crate::scalar::{Backend, Scalar};

pub type Tensor2<S> = [[S; 4]; 4];
pub type Tensor3<S> = [[[S; 4]; 4]; 4];
pub type Tensor4<S> = [[[[S; 4]; 4]; 4]; 4];

fn t2<S>(mut f: impl FnMut(usize, usize) -> S) -> Tensor2<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| f(i, j)))
}

fn t3<S>(mut f: impl FnMut(usize, usize, usize) -> S) -> Tensor3<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| f(i, j, k))))
}

fn t4<S>(mut f: impl FnMut(usize, usize, usize, usize) -> S) -> Tensor4<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| std::array::from_fn(|l| f(i, j, k, l)))))
}

fn sum<S: Scalar>(f: impl Fn(usize) -> S) -> S {
    (0..4).fold(S::zero(), |acc, m| acc + f(m))
}

/// A 4-dimensional Lie algebra in the Ψ frame of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra4<S> {
    basis: ModelKind,
    c: Tensor3<S>,
    label: Option<String>,
}

impl<S: Scalar> LieAlgebra4<S> {
    /// `c[i][j][k]` is the `Ψ_k` coefficient of `[Ψ_i, Ψ_j]`.
    pub fn new(basis: ModelKind, c: Tensor3<S>) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    if c[i][j][k] != -c[j][i][k].clone() {
                        return Err(Error::NotAntisymmetric(i + 1, j + 1));
                    }
                }
            }
        }
        Ok(LieAlgebra4 { basis, c, label: None })
    }

    pub fn abelian(basis: ModelKind) -> Self {
        LieAlgebra4 { basis, c: t3(|_, _, _| S::zero()), label: None }
    }

    /// Builds an algebra from brackets `[Ψ_i, Ψ_j] = v` for `i < j`
    /// (0-based); unlisted brackets vanish.
    pub fn from_brackets(basis: ModelKind, brackets: &[(usize, usize, [S; 4])]) -> Self {
        let mut c = t3(|_, _, _| S::zero());
        for (i, j, v) in brackets {
            for k in 0..4 {
                c[*i][*j][k] = c[*i][*j][k].clone() + v[k].clone();
                c[*j][*i][k] = c[*j][*i][k].clone() - v[k].clone();
            }
        }
        LieAlgebra4 { basis, c, label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn basis(&self) -> ModelKind {
        self.basis
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn constants(&self) -> &Tensor3<S> {
        &self.c
    }

    /// Sets `c_{ij}^k` and `c_{ji}^k = −c_{ij}^k`.
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: S) {
        self.c[j][i][k] = -value.clone();
        self.c[i][j][k] = value;
    }

    pub fn bracket(&self, x: &[S; 4], y: &[S; 4]) -> [S; 4] {
        std::array::from_fn(|k| {
            let mut acc = S::zero();
            for i in 0..4 {
                if x[i].is_zero() {
                    continue;
                }
                for j in 0..4 {
                    if !y[j].is_zero() && !self.c[i][j][k].is_zero() {
                        acc = acc + x[i].clone() * y[j].clone() * self.c[i][j][k].clone();
                    }
                }
            }
            acc
        })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LieAlgebra4<T> {
        LieAlgebra4 { basis: self.basis, c: t3(|i, j, k| f(&self.c[i][j][k])), label: self.label.clone() }
    }

    pub fn try_map<T: Scalar>(&self, f: impl Fn(&S) -> Result<T>) -> Result<LieAlgebra4<T>> {
        let mut out = LieAlgebra4::<T>::abelian(self.basis);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    out.c[i][j][k] = f(&self.c[i][j][k])?;
                }
            }
        }
        out.label = self.label.clone();
        Ok(out)
    }

    /// The bracket `[x, y]' = U⁻¹[Ux, Uy]`; metric and `J` stay fixed.
    pub fn conjugate_by(&self, u: &Matrix4<S>) -> Result<Self> {
        let inv = u.inverse()?;
        let cols: [[S; 4]; 4] = std::array::from_fn(|j| std::array::from_fn(|i| u.0[i][j].clone()));
        let mut c = t3(|_, _, _| S::zero());
        for i in 0..4 {
            for j in (i + 1)..4 {
                let b = inv.apply(&self.bracket(&cols[i], &cols[j]));
                for k in 0..4 {
                    c[j][i][k] = -b[k].clone();
                    c[i][j][k] = b[k].clone();
                }
            }
        }
        Ok(LieAlgebra4 { basis: self.basis, c, label: self.label.clone() })
    }

    /// `[[x,y],z] + [[y,z],x] + [[z,x],y]` on basis triples, indexed
    /// `[i][j][k][l]` with `l` the output component.
    pub fn jacobi_defect(&self) -> Tensor4<S> {
        let c = &self.c;
        t4(|i, j, k, l| {
            sum(|m| {
                c[i][j][m].clone() * c[m][k][l].clone()
                    + c[j][k][m].clone() * c[m][i][l].clone()
                    + c[k][i][m].clone() * c[m][j][l].clone()
            })
        })
    }

    /// Reality of the bracket relative to the model's conjugation: for the
    /// para model the constants are real; for the Hermitian model
    /// `c_{σi σj}^{σk} = conj(c_{ij}^k)` with `σ = (1 3)(2 4)`.
    pub fn reality_defect(&self) -> Tensor3<S> {
        let sigma = |i: usize| match self.basis {
            ModelKind::Hermitian => (i + 2) % 4,
            ModelKind::Para => i,
        };
        t3(|i, j, k| self.c[sigma(i)][sigma(j)][sigma(k)].clone() - self.c[i][j][k].conj())
    }
}

fn flat3<S: Clone>(t: &Tensor3<S>) -> Vec<S> {
    t.iter().flatten().flatten().cloned().collect()
}

fn flat4<S: Clone>(t: &Tensor4<S>) -> Vec<S> {
    t.iter().flatten().flatten().flatten().cloned().collect()
}

/// Nijenhuis tensor `N(Ψ_i, Ψ_j) = Σ_k N[i][j][k] Ψ_k`:
/// `N(x,y) = [x,y] + σ(J[Jx,y] + J[x,Jy]) − σ[Jx,Jy]`, with `σ = +1`
/// for `J² = −1` and `σ = −1` for `J² = +1`.
pub fn nijenhuis<S: Scalar>(algebra: &LieAlgebra4<S>, model: &ModelSpace<S>) -> Tensor3<S> {
    let j = model.j();
    let sigma = S::from_i64(-model.kind().j_square_sign());
    let basis = |i: usize| -> [S; 4] { std::array::from_fn(|k| if k == i { S::one() } else { S::zero() }) };
    let mut n = t3(|_, _, _| S::zero());
    for a in 0..4 {
        for b in 0..4 {
            let (x, y) = (basis(a), basis(b));
            let (jx, jy) = (j.apply(&x), j.apply(&y));
            let t1 = algebra.bracket(&x, &y);
            let t2 = j.apply(&algebra.bracket(&jx, &y));
            let t3v = j.apply(&algebra.bracket(&x, &jy));
            let t4v = algebra.bracket(&jx, &jy);
            for k in 0..4 {
                n[a][b][k] = t1[k].clone() + sigma.clone() * (t2[k].clone() + t3v[k].clone() - t4v[k].clone());
            }
        }
    }
    n
}

/// `dΨ^i = −Σ_{j<k} c_{jk}^i Ψ^j∧Ψ^k`.
pub fn d_coframe<S: Scalar>(algebra: &LieAlgebra4<S>) -> [KForm<S>; 4] {
    std::array::from_fn(|i| {
        let coeffs = monomials(2).iter().map(|jk| -algebra.c[jk[0]][jk[1]][i].clone()).collect();
        KForm::from_coeffs(2, coeffs).expect("six 2-form coefficients")
    })
}

/// Chevalley–Eilenberg differential on left-invariant forms.
pub fn ce_differential<S: Scalar>(algebra: &LieAlgebra4<S>, w: &KForm<S>) -> Result<KForm<S>> {
    let k = w.degree();
    if k >= 4 {
        return Err(Error::DegreeOverflow(k + 1));
    }
    let dpsi = d_coframe(algebra);
    let mut out = KForm::<S>::zero(k + 1);
    for (idx, coeff) in w.iter() {
        if coeff.is_zero() {
            continue;
        }
        for p in 0..k {
            let mut term = KForm::scalar(if p % 2 == 0 { coeff.clone() } else { -coeff.clone() });
            for (q, &i) in idx.iter().enumerate() {
                let factor = if q == p { dpsi[i].clone() } else { KForm::monomial(&[i]) };
                term = term.wedge(&factor)?;
            }
            out = out + term;
        }
    }
    Ok(out)
}

/// `δ = −⋆d⋆`; lowers degree by one.
pub fn codifferential<S: Scalar>(frame: &Frame<S>, algebra: &LieAlgebra4<S>, w: &KForm<S>) -> Result<KForm<S>> {
    if w.degree() == 0 {
        return Err(Error::DegreeMismatch(0, 1));
    }
    Ok(-frame.hodge_star(&ce_differential(algebra, &frame.hodge_star(w))?))
}

/// The Lee form `δΩ`.
pub fn lee_form<S: Scalar>(algebra: &LieAlgebra4<S>, model: &ModelSpace<S>) -> KForm<S> {
    codifferential(model.frame(), algebra, model.omega()).expect("Ω has degree 2")
}

fn phi_unchecked<S: Scalar>(algebra: &LieAlgebra4<S>, model: &ModelSpace<S>) -> KForm<S> {
    let anti_lee = model.act_on_form(&lee_form(algebra, model));
    let half = match model.kind() {
        ModelKind::Para => S::from_ratio(1, 2),
        ModelKind::Hermitian => S::from_ratio(-1, 2),
    };
    anti_lee.scale(&half)
}

fn require_integrable<S: Scalar>(algebra: &LieAlgebra4<S>, model: &ModelSpace<S>) -> Result<()> {
    if model.integrability_predicates(algebra) {
        Ok(())
    } else {
        Err(Error::NotIntegrable)
    }
}

/// The Weyl 1-form `φ = ±½J±δΩ` of the Kähler–Weyl structure.
pub fn weyl_one_form<S: Scalar>(algebra: &LieAlgebra4<S>, model: &ModelSpace<S>) -> Result<KForm<S>> {
    require_integrable(algebra, model)?;
    Ok(phi_unchecked(algebra, model))
}

/// Left-invariant connection, `∇_{Ψ_i}Ψ_j = Σ_k gamma[i][j][k] Ψ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantConnection<S: Scalar> {
    pub gamma: Tensor3<S>,
    /// Associated 1-form of a Weyl connection (`None` for Levi-Civita).
    pub phi: Option<KForm<S>>,
}

impl<S: Scalar> InvariantConnection<S> {
    /// `∇_x y` for arbitrary invariant vector fields.
    pub fn covariant(&self, x: &[S; 4], y: &[S; 4]) -> [S; 4] {
        std::array::from_fn(|k| {
            let mut acc = S::zero();
            for i in 0..4 {
                for j in 0..4 {
                    acc = acc + x[i].clone() * y[j].clone() * self.gamma[i][j][k].clone();
                }
            }
            acc
        })
    }

    /// `Γ_{ij}^k − Γ_{ji}^k − c_{ij}^k`.
    pub fn torsion(&self, algebra: &LieAlgebra4<S>) -> Tensor3<S> {
        let g = &self.gamma;
        t3(|i, j, k| g[i][j][k].clone() - g[j][i][k].clone() - algebra.c[i][j][k].clone())
    }

    pub fn curvature(&self, algebra: &LieAlgebra4<S>, frame: &Frame<S>) -> CurvatureData<S> {
        curvature(self, algebra, frame)
    }
}

/// Koszul formula: `2g(∇ₓy, z) = g([x,y],z) − g([y,z],x) + g([z,x],y)`.
pub fn levi_civita<S: Scalar>(algebra: &LieAlgebra4<S>, frame: &Frame<S>) -> InvariantConnection<S> {
    let c = &algebra.c;
    let g = &frame.metric().0;
    let gi = &frame.inverse_metric().0;
    let half = S::from_ratio(1, 2);
    let lower = t3(|i, j, l| {
        half.clone()
            * sum(|m| c[i][j][m].clone() * g[m][l].clone() - c[j][l][m].clone() * g[m][i].clone() + c[l][i][m].clone() * g[m][j].clone())
    });
    let gamma = t3(|i, j, k| sum(|l| lower[i][j][l].clone() * gi[l][k].clone()));
    InvariantConnection { gamma, phi: None }
}

fn weyl_from_phi<S: Scalar>(algebra: &LieAlgebra4<S>, frame: &Frame<S>, phi: KForm<S>) -> InvariantConnection<S> {
    let lc = levi_civita(algebra, frame);
    let p = phi.as_covector().0;
    let sharp = frame.sharp(&phi.as_covector()).0;
    let g = &frame.metric().0;
    let delta = |a: usize, b: usize| if a == b { S::one() } else { S::zero() };
    let gamma = t3(|i, j, k| {
        lc.gamma[i][j][k].clone() + p[i].clone() * delta(j, k) + p[j].clone() * delta(i, k) - g[i][j].clone() * sharp[k].clone()
    });
    InvariantConnection { gamma, phi: Some(phi) }
}

/// Kähler–Weyl connection `∇ₓy = ∇ᵍₓy + φ(x)y + φ(y)x − g(x,y)φ♯`.
pub fn weyl_connection<S: Scalar>(algebra: &LieAlgebra4<S>, model: &ModelSpace<S>) -> Result<InvariantConnection<S>> {
    let phi = weyl_one_form(algebra, model)?;
    Ok(weyl_from_phi(algebra, model.frame(), phi))
}

/// Curvature and Ricci data of an invariant connection.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData<S: Scalar> {
    /// `𝓡(Ψ_i, Ψ_j)Ψ_k = Σ_l r_up[i][j][k][l] Ψ_l`.
    pub r_up: Tensor4<S>,
    /// `R(Ψ_i, Ψ_j, Ψ_k, Ψ_l)`.
    pub r: Tensor4<S>,
    pub rho: Tensor2<S>,
    pub rho_s: Tensor2<S>,
    pub rho_a: Tensor2<S>,
    pub rho_a_form: KForm<S>,
}

pub fn curvature<S: Scalar>(conn: &InvariantConnection<S>, algebra: &LieAlgebra4<S>, frame: &Frame<S>) -> CurvatureData<S> {
    let gm = &conn.gamma;
    let c = &algebra.c;
    let g = &frame.metric().0;
    let r_up = t4(|i, j, k, l| {
        sum(|m| gm[j][k][m].clone() * gm[i][m][l].clone() - gm[i][k][m].clone() * gm[j][m][l].clone() - c[i][j][m].clone() * gm[m][k][l].clone())
    });
    let r = t4(|i, j, k, l| sum(|m| r_up[i][j][k][m].clone() * g[m][l].clone()));
    let rho = t2(|a, b| sum(|k| r_up[k][a][b][k].clone()));
    let half = S::from_ratio(1, 2);
    let rho_s = t2(|a, b| half.clone() * (rho[a][b].clone() + rho[b][a].clone()));
    let rho_a = t2(|a, b| half.clone() * (rho[a][b].clone() - rho[b][a].clone()));
    let rho_a_form = KForm::from_coeffs(2, monomials(2).iter().map(|ab| rho_a[ab[0]][ab[1]].clone()).collect()).expect("degree 2");
    CurvatureData { r_up, r, rho, rho_s, rho_a, rho_a_form }
}

/// Full Kähler–Weyl pipeline output for one algebra.
#[derive(Debug, Clone)]
pub struct Pipeline<S: Scalar> {
    pub lee: KForm<S>,
    pub phi: KForm<S>,
    pub connection: InvariantConnection<S>,
    pub curvature: CurvatureData<S>,
}

/// Runs the pipeline without checking integrability; residual checks then
/// reveal the failure.
pub fn pipeline_unchecked<S: Scalar>(algebra: &LieAlgebra4<S>, model: &ModelSpace<S>) -> Pipeline<S> {
    let lee = lee_form(algebra, model);
    let phi = phi_unchecked(algebra, model);
    let connection = weyl_from_phi(algebra, model.frame(), phi.clone());
    let curvature = curvature(&connection, algebra, model.frame());
    Pipeline { lee, phi, connection, curvature }
}

pub fn pipeline<S: Scalar>(algebra: &LieAlgebra4<S>, model: &ModelSpace<S>) -> Result<Pipeline<S>> {
    require_integrable(algebra, model)?;
    Ok(pipeline_unchecked(algebra, model))
}

/// One named residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// Largest entry modulus (largest coefficient modulus for polynomials).
    pub max_abs: f64,
    /// Exact backends: whether every entry is exactly zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_zero: Option<bool>,
    /// Exact backends: the first nonzero entry, as `index: value`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub pass: bool,
}

impl Residual {
    pub fn from_entries<S: Scalar>(entries: &[S], labels: impl Fn(usize) -> String, tol: f64) -> Self {
        let max_abs = entries.iter().map(|x| x.magnitude()).fold(0.0, f64::max);
        if S::is_exact() {
            let first = entries.iter().position(|x| !x.is_zero());
            Residual {
                max_abs,
                exact_zero: Some(first.is_none()),
                witness: first.map(|p| format!("{}: {}", labels(p), entries[p])),
                pass: first.is_none(),
            }
        } else {
            Residual { max_abs, exact_zero: None, witness: None, pass: max_abs <= tol }
        }
    }
}

/// Certificate produced by [`check_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub backend: Backend,
    pub model: ModelKind,
    pub tolerance: f64,
    pub residuals: BTreeMap<String, Residual>,
    /// `ρ_a = 0`: the Weyl structure is trivial.
    pub trivial_weyl: bool,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn residual(&self, name: &str) -> Option<&Residual> {
        self.residuals.get(name)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.residuals.iter().filter(|(_, r)| !r.pass).map(|(k, _)| k.as_str()).collect()
    }

    pub fn jacobi_failed(&self) -> bool {
        self.residuals.get("jacobi").is_some_and(|r| !r.pass)
    }
}

pub const RESIDUAL_NAMES: [&str; 11] = [
    "jacobi",
    "nijenhuis",
    "torsion",
    "weyl_compat",
    "kahler_parallel",
    "sym_1a_i",
    "sym_1a_ii",
    "sym_1a_iii",
    "sym_1d",
    "rho_a_vs_dJdeltaOmega",
    "rho_a_vs_minus2dphi",
];

fn label3(p: usize) -> String {
    format!("[{}{}{}]", p / 16 + 1, (p / 4) % 4 + 1, p % 4 + 1)
}

fn label4(p: usize) -> String {
    format!("[{}{}{}{}]", p / 64 + 1, (p / 16) % 4 + 1, (p / 4) % 4 + 1, p % 4 + 1)
}

fn label_form(w: &KForm<impl Scalar>) -> impl Fn(usize) -> String + '_ {
    move |p| format!("Ψ^{}", crate::exterior::index_key(monomials(w.degree())[p]))
}

/// All residuals of the Kähler–Weyl structure, after the full pipeline.
pub struct SuiteOutput<S: Scalar> {
    pub report: VerificationReport,
    pub pipeline: Pipeline<S>,
}

/// Runs the pipeline and every symmetry check. Failures are reported, never
/// raised; on non-integrable input the pipeline is still evaluated.
pub fn check_suite<S: Scalar>(algebra: &LieAlgebra4<S>, model: &ModelSpace<S>, tol: f64) -> SuiteOutput<S> {
    let mut residuals = BTreeMap::new();
    let mut put = |name: &str, r: Residual| {
        residuals.insert(name.to_string(), r);
    };
    put("jacobi", Residual::from_entries(&flat4(&algebra.jacobi_defect()), label4, tol));
    put("nijenhuis", Residual::from_entries(&flat3(&nijenhuis(algebra, model)), label3, tol));

    let p = pipeline_unchecked(algebra, model);
    let g = &model.frame().metric().0;
    let j = &model.j().0;
    let gm = &p.connection.gamma;
    let phi = p.phi.as_covector().0;
    let r = &p.curvature.r;
    let rho_a = &p.curvature.rho_a;

    put("torsion", Residual::from_entries(&flat3(&p.connection.torsion(algebra)), label3, tol));

    let two = S::from_i64(2);
    let compat = t3(|i, a, b| {
        -sum(|m| gm[i][a][m].clone() * g[m][b].clone()) - sum(|m| gm[i][b][m].clone() * g[a][m].clone())
            + two.clone() * phi[i].clone() * g[a][b].clone()
    });
    put("weyl_compat", Residual::from_entries(&flat3(&compat), label3, tol));

    let parallel = t3(|i, jj, l| sum(|m| j[m][jj].clone() * gm[i][m][l].clone()) - sum(|m| j[l][m].clone() * gm[i][jj][m].clone()));
    put("kahler_parallel", Residual::from_entries(&flat3(&parallel), label3, tol));

    let s1 = t4(|x, y, z, w| r[x][y][z][w].clone() + r[y][x][z][w].clone());
    put("sym_1a_i", Residual::from_entries(&flat4(&s1), label4, tol));
    let s2 = t4(|x, y, z, w| r[x][y][z][w].clone() + r[y][z][x][w].clone() + r[z][x][y][w].clone());
    put("sym_1a_ii", Residual::from_entries(&flat4(&s2), label4, tol));
    // R(x,y,z,w) + R(x,y,w,z) = −(4/m)ρ_a(x,y)g(z,w) with m = 4
    let s3 = t4(|x, y, z, w| r[x][y][z][w].clone() + r[x][y][w][z].clone() + rho_a[x][y].clone() * g[z][w].clone());
    put("sym_1a_iii", Residual::from_entries(&flat4(&s3), label4, tol));

    // R(x,y,Jz,Jw) = ∓R(x,y,z,w)
    let sign = S::from_i64(model.kind().j_square_sign());
    let s4 = t4(|x, y, z, w| {
        let mut acc = S::zero();
        for a in 0..4 {
            if j[a][z].is_zero() {
                continue;
            }
            for b in 0..4 {
                if !j[b][w].is_zero() {
                    acc = acc + j[a][z].clone() * j[b][w].clone() * r[x][y][a][b].clone();
                }
            }
        }
        acc + sign.clone() * r[x][y][z][w].clone()
    });
    put("sym_1d", Residual::from_entries(&flat4(&s4), label4, tol));

    // ρ_a = ∓dJ±δΩ
    let d_anti_lee = ce_differential(algebra, &model.act_on_form(&p.lee)).expect("degree 1");
    let via_lee = match model.kind() {
        ModelKind::Para => p.curvature.rho_a_form.clone() + d_anti_lee,
        ModelKind::Hermitian => p.curvature.rho_a_form.clone() - d_anti_lee,
    };
    put("rho_a_vs_dJdeltaOmega", Residual::from_entries(via_lee.coeffs(), label_form(&via_lee), tol));
    let via_phi = p.curvature.rho_a_form.clone() + ce_differential(algebra, &p.phi).expect("degree 1").scale(&two);
    put("rho_a_vs_minus2dphi", Residual::from_entries(via_phi.coeffs(), label_form(&via_phi), tol));

    let trivial_weyl = p.curvature.rho_a_form.within(tol);
    let mut notes = Vec::new();
    if trivial_weyl {
        notes.push("trivial Weyl structure (ρ_a = 0)".to_string());
    }
    if !residuals["nijenhuis"].pass {
        notes.push("structure not integrable; Kähler–Weyl residuals computed without the integrability precondition".into());
    }
    let pass = residuals.values().all(|r| r.pass);
    SuiteOutput {
        report: VerificationReport { pass, backend: S::BACKEND, model: model.kind(), tolerance: tol, residuals, trivial_weyl, notes },
        pipeline: p,
    }
}
