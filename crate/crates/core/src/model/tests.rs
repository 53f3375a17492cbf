use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::exterior::Vector;
use crate::scalar::{GaussianRational as Q, ParamPoly, Rational};

type F = FloatComplex;

fn m<S: Scalar>(idx: &[usize]) -> KForm<S> {
    KForm::monomial(idx)
}

fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

fn rand_q(rng: &mut ChaCha8Rng) -> Q {
    q(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

fn rand_theta(rng: &mut ChaCha8Rng) -> [Q; 5] {
    std::array::from_fn(|_| rand_q(rng))
}

fn rand_f(rng: &mut ChaCha8Rng) -> F {
    F::from(rng.gen_range(-2.0..2.0))
}

/// Bilinear form matrix of a 2-form, `a[i][j] = ξ(Ψ_i, Ψ_j)`.
fn form_matrix<S: Scalar>(w: &KForm<S>) -> Matrix4<S> {
    let mut a = Matrix4::zero();
    for (idx, c) in w.iter() {
        a.0[idx[0]][idx[1]] = c.clone();
        a.0[idx[1]][idx[0]] = -c.clone();
    }
    a
}

fn matrix_form<S: Scalar>(a: &Matrix4<S>) -> KForm<S> {
    KForm::from_coeffs(2, crate::exterior::monomials(2).iter().map(|ij| a.0[ij[0]][ij[1]].clone()).collect()).unwrap()
}

/// `(T*ξ)(x, y) = ξ(Tx, Ty)` as the matrix product `Tᵀ A T`.
fn pullback_oracle<S: Scalar>(t: &Matrix4<S>, w: &KForm<S>) -> KForm<S> {
    matrix_form(&t.transpose().mul(&form_matrix(w)).mul(t))
}

fn su2_block(rng: &mut ChaCha8Rng) -> [[F; 2]; 2] {
    // unit quaternion (a, b, c, d) ↦ [[a + ib, c + id], [−c + id, a − ib]]
    let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = v.map(|x| x / n);
    [[F::new(a, b), F::new(c, d)], [F::new(-c, d), F::new(a, -b)]]
}

fn rand_unitary_hermitian(rng: &mut ChaCha8Rng) -> UnitaryElement<F> {
    let b = su2_block(rng);
    let tau: f64 = rng.gen_range(-PI..PI);
    let p = F::new(tau.cos(), tau.sin());
    UnitaryElement::hermitian([[b[0][0] * p, b[0][1] * p], [b[1][0] * p, b[1][1] * p]])
}

#[test]
fn models_build_for_every_backend() {
    for kind in [ModelKind::Hermitian, ModelKind::Para] {
        ModelSpace::<Q>::build(kind);
        ModelSpace::<F>::build(kind);
        ModelSpace::<ParamPoly>::build(kind);
    }
}

#[test]
fn hermitian_frame_values() {
    let h = ModelSpace::<Q>::build(ModelKind::Hermitian);
    let z = |i| Vector::<Q>::basis(i);
    assert_eq!(h.frame().vector_inner(&z(0), &z(2)), Q::one());
    assert_eq!(h.frame().vector_inner(&z(1), &z(3)), Q::one());
    assert_eq!(h.frame().vector_inner(&z(0), &z(0)), Q::zero());
    // Ω = −√−1 (Z¹∧Z̄¹ + Z²∧Z̄²)
    assert_eq!(*h.omega(), (m(&[0, 2]) + m(&[1, 3])).scale(&-Q::i()));
    // J Z₁ = √−1 Z₁, J Z̄₁ = −√−1 Z̄₁
    assert_eq!(h.j().0[0][0], Q::i());
    assert_eq!(h.j().0[2][2], -Q::i());
    let e = h.real_frame().unwrap();
    assert_eq!(e.form_inner(&m(&[0]), &m(&[0])).unwrap(), q(1, 2));
}

#[test]
fn para_frame_values() {
    let p = ModelSpace::<Q>::build(ModelKind::Para);
    let je3 = p.j().apply(&Vector::<Q>::basis(2).0);
    assert_eq!(je3, [Q::zero(), Q::zero(), -Q::one(), Q::zero()]);
    assert_eq!(*p.omega(), -m(&[0, 2]) - m(&[1, 3]));
    let sharp = p.frame().sharp(&m::<Q>(&[0]).as_covector());
    assert_eq!(sharp, Vector::basis(2));
}

#[test]
fn theta_inner_product_tables() {
    let h = ModelSpace::<Q>::build(ModelKind::Hermitian);
    let p = ModelSpace::<Q>::build(ModelKind::Para);
    let hv: Vec<Q> = h.theta().iter().map(|t| h.frame().form_inner(t, t).unwrap()).collect();
    let pv: Vec<Q> = p.theta().iter().map(|t| p.frame().form_inner(t, t).unwrap()).collect();
    assert_eq!(hv, [2, 2, 2, 2, 2].map(Q::from_i64));
    assert_eq!(pv, [-2, -2, 2, 2, -2].map(Q::from_i64));
}

#[test]
fn projection_ranks_match_dimension_table() {
    for kind in [ModelKind::Hermitian, ModelKind::Para] {
        assert_eq!(ModelSpace::<Q>::build(kind).projection_ranks(), [1, 3, 2]);
    }
}

#[test]
fn split_basis_elements() {
    for kind in [ModelKind::Hermitian, ModelKind::Para] {
        let model = ModelSpace::<Q>::build(kind);
        let s = model.split_two_form(&model.theta()[1]).unwrap();
        assert_eq!(s.theta, [0, 1, 0, 0, 0].map(Q::from_i64));
        assert_eq!(s.omega, Q::zero());
        let s = model.split_two_form(model.omega()).unwrap();
        assert_eq!(s.theta, [0, 0, 0, 0, 0].map(Q::from_i64));
        assert_eq!(s.omega, Q::one());
    }
}

/// Independent oracle: solve the 6×6 linear system c·θ + ω·Ω = ξ.
fn split_by_linear_solve(model: &ModelSpace<Q>, xi: &KForm<Q>) -> Vec<Q> {
    let mut cols: Vec<&KForm<Q>> = model.theta().iter().collect();
    cols.push(model.omega());
    let a: Vec<Vec<Q>> = (0..6).map(|r| cols.iter().map(|c| c.coeffs()[r].clone()).collect()).collect();
    crate::matrix::solve(&a, xi.coeffs()).unwrap()
}

#[test]
fn split_agrees_with_linear_solve_and_reassembles() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for kind in [ModelKind::Hermitian, ModelKind::Para] {
        let model = ModelSpace::<Q>::build(kind);
        for _ in 0..100 {
            let xi = model.assemble_two_form(&rand_theta(&mut rng), &rand_q(&mut rng));
            let s = model.split_two_form(&xi).unwrap();
            let mut coords = s.theta.to_vec();
            coords.push(s.omega.clone());
            assert_eq!(coords, split_by_linear_solve(&model, &xi));
            assert_eq!(s.reassemble(&model), xi);
            let parts = [s.chi_part(&model), s.zero_part(&model), s.pm_part(&model)];
            for a in 0..3 {
                for b in 0..a {
                    assert!(model.frame().form_inner(&parts[a], &parts[b]).unwrap().is_zero());
                }
            }
            // J-eigenvalues of the parts
            let lam = if kind == ModelKind::Para { -Q::one() } else { Q::one() };
            assert_eq!(model.act_on_form(&parts[1]), parts[1].scale(&lam));
            assert_eq!(model.act_on_form(&parts[2]), parts[2].scale(&-lam.clone()));
        }
    }
}

#[test]
fn hermitian_reality() {
    let h = ModelSpace::<Q>::build(ModelKind::Hermitian);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let coeffs = (0..6).map(|_| Q::real(Rational::new(rng.gen_range(-9..9), rng.gen_range(1..4)))).collect();
        let real_e = KForm::from_coeffs(2, coeffs).unwrap();
        let z = h.from_real_basis(&real_e).unwrap();
        assert!(h.is_real(&z, 0.0));
        assert_eq!(h.to_real_basis(&z).unwrap(), real_e);
    }
    let bad = m::<Q>(&[0, 1]).scale(&Q::i());
    assert!(matches!(h.split_two_form(&bad), Err(Error::RealityViolation(_))));
}

#[test]
fn orbit_invariant_examples() {
    let h = ModelSpace::<Q>::build(ModelKind::Hermitian);
    let inv = h.orbit_invariants(&h.theta()[0]).unwrap();
    assert_eq!((inv.x, inv.y), (Q::from_i64(2), Q::zero()));
    let inv = h.orbit_invariants(&KForm::zero(2)).unwrap();
    assert_eq!((inv.x, inv.y), (Q::zero(), Q::zero()));
    let p = ModelSpace::<Q>::build(ModelKind::Para);
    assert_eq!(p.orbit_invariants(&p.theta()[0]), Err(Error::ParaOrbitInvariants));
}

#[test]
fn induced_action_examples() {
    let p = ModelSpace::<Q>::build(ModelKind::Para);
    let xi = p.theta()[3].clone() + p.theta()[4].clone();
    assert_eq!(xi, m(&[0, 1]).scale(&Q::from_i64(2)));
    let id = UnitaryElement::identity(ModelKind::Para);
    assert_eq!(p.induced_action(&id, &xi).unwrap(), xi);
    let u = UnitaryElement::para([[Q::from_i64(2), Q::zero()], [Q::zero(), Q::one()]]).unwrap();
    assert_eq!(u.matrix, Matrix4::diagonal([Q::from_i64(2), Q::one(), q(1, 2), Q::one()]));
    assert_eq!(p.induced_action(&u, &xi).unwrap(), xi.scale(&Q::from_i64(2)));

    let bad = UnitaryElement::from_matrix(ModelKind::Para, Matrix4::diagonal([Q::from_i64(2), Q::one(), Q::one(), Q::one()]));
    assert_eq!(p.induced_action(&bad, &xi), Err(Error::NotUnitary));
    let h = ModelSpace::<Q>::build(ModelKind::Hermitian);
    let not_unitary = UnitaryElement::hermitian([[Q::from_i64(2), Q::zero()], [Q::zero(), Q::one()]]);
    assert_eq!(h.induced_action(&not_unitary, &h.theta()[0]), Err(Error::NotUnitary));
    assert_eq!(h.induced_action(&id, &xi), Err(Error::ModelMismatch("hermitian")));
}

#[test]
fn hermitian_diagonal_torus_action() {
    let h = ModelSpace::<F>::build(ModelKind::Hermitian);
    let tau = PI / 4.0;
    let u = UnitaryElement::hermitian([[F::new(tau.cos(), tau.sin()), F::zero()], [F::zero(), F::new(tau.cos(), -tau.sin())]]);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let theta: [F; 5] = std::array::from_fn(|_| rand_f(&mut rng));
        let xi = h.assemble_two_form(&theta, &F::zero());
        let out = h.induced_action(&u, &xi).unwrap();
        assert!((out.clone() - pullback_oracle(&u.matrix, &xi)).within(1e-12));
        let s = h.split_two_form(&out).unwrap();
        // determinant is 1, so Λ²₋ is fixed; Λ²₀,₊ turns in the (θ₂, θ₃) plane
        assert!((s.theta[0] - theta[0]).magnitude() < 1e-12);
        assert!((s.theta[3] - theta[3]).magnitude() < 1e-12);
        assert!((s.theta[4] - theta[4]).magnitude() < 1e-12);
        let r0 = theta[1].re().hypot(theta[2].re());
        let r1 = s.theta[1].re().hypot(s.theta[2].re());
        assert!((r0 - r1).abs() < 1e-12);
        let turned = (s.theta[2].re().atan2(s.theta[1].re()) - theta[2].re().atan2(theta[1].re())).rem_euclid(2.0 * PI);
        // SU(2) → SO(3) doubles the angle
        assert!((turned - 2.0 * tau).abs() < 1e-9 || r0 < 1e-9, "rotation angle {turned}");
    }
}

#[test]
fn hermitian_central_phase_acts_by_determinant() {
    let h = ModelSpace::<F>::build(ModelKind::Hermitian);
    let tau = 0.37f64;
    let p = F::new(tau.cos(), tau.sin());
    let u = UnitaryElement::hermitian([[p, F::zero()], [F::zero(), p]]);
    let theta = [0.3, -1.1, 0.7, 0.4, 1.9].map(F::from);
    let out = h.split_two_form(&h.induced_action(&u, &h.assemble_two_form(&theta, &F::zero())).unwrap()).unwrap();
    for k in 0..3 {
        assert!((out.theta[k] - theta[k]).magnitude() < 1e-12);
    }
    let w0 = num_complex::Complex64::new(0.4, 1.9) * num_complex::Complex64::from_polar(1.0, 2.0 * tau);
    assert!((out.theta[3].re() - w0.re).abs() < 1e-12);
    assert!((out.theta[4].re() - w0.im).abs() < 1e-12);
}

#[test]
fn induced_action_is_a_right_action_and_respects_the_splitting() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let p = ModelSpace::<Q>::build(ModelKind::Para);
    let rand_block = |rng: &mut ChaCha8Rng| loop {
        let a: [[Q; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| rand_q(rng)));
        if let Ok(u) = UnitaryElement::para(a) {
            return u;
        }
    };
    for _ in 0..50 {
        let (u1, u2) = (rand_block(&mut rng), rand_block(&mut rng));
        let xi = p.assemble_two_form(&rand_theta(&mut rng), &rand_q(&mut rng));
        let lhs = p.induced_action(&u1, &p.induced_action(&u2, &xi).unwrap()).unwrap();
        assert_eq!(lhs, p.induced_action(&u2.compose(&u1), &xi).unwrap());
        assert_eq!(p.induced_action(&u1, &xi).unwrap(), pullback_oracle(&u1.matrix, &xi));

        let s = p.split_two_form(&xi).unwrap();
        let image = p.split_two_form(&p.induced_action(&u1, &xi).unwrap()).unwrap();
        let act = |w: &KForm<Q>| p.induced_action(&u1, w).unwrap();
        assert_eq!(act(&s.chi_part(&p)), image.chi_part(&p));
        assert_eq!(act(&s.zero_part(&p)), image.zero_part(&p));
        assert_eq!(act(&s.pm_part(&p)), image.pm_part(&p));
        let ip = |w: &KForm<Q>| p.frame().form_inner(w, w).unwrap();
        assert_eq!(ip(&xi), ip(&act(&xi)));
    }
    let h = ModelSpace::<F>::build(ModelKind::Hermitian);
    for _ in 0..50 {
        let (u1, u2) = (rand_unitary_hermitian(&mut rng), rand_unitary_hermitian(&mut rng));
        let theta: [F; 5] = std::array::from_fn(|_| rand_f(&mut rng));
        let xi = h.assemble_two_form(&theta, &rand_f(&mut rng));
        let lhs = h.induced_action(&u1, &h.induced_action(&u2, &xi).unwrap()).unwrap();
        assert!((lhs - h.induced_action(&u2.compose(&u1), &xi).unwrap()).within(1e-12));
        let s = h.split_two_form(&xi).unwrap();
        let image = h.split_two_form(&h.induced_action(&u1, &xi).unwrap()).unwrap();
        assert!((h.induced_action(&u1, &s.zero_part(&h)).unwrap() - image.zero_part(&h)).within(1e-12));
        assert!((h.induced_action(&u1, &s.pm_part(&h)).unwrap() - image.pm_part(&h)).within(1e-12));
        assert!((image.omega - s.omega).magnitude() < 1e-12);
    }
}

#[test]
fn normalize_theta1_examples() {
    let p = ModelSpace::<Q>::build(ModelKind::Para);
    let xi = p.assemble_two_form(&[0, 3, -1, 2, 5].map(Q::from_i64), &Q::zero());
    let (u, out) = p.normalize_theta1(&xi).unwrap();
    assert!(u.is_identity());
    assert_eq!(out, xi);

    // rational half-angle: (c₁, c₂) = (24, 7)
    let xi = p.assemble_two_form(&[24, 7, 3, -2, 1].map(Q::from_i64), &Q::zero());
    let (u, out) = p.normalize_theta1(&xi).unwrap();
    let s = p.split_two_form(&out).unwrap();
    assert_eq!(s.theta, [0, 25, 3, -2, 1].map(Q::from_i64));
    p.check_unitary(&u).unwrap();

    assert!(matches!(p.normalize_theta1(&p.theta()[0]), Err(Error::NotRepresentable(_))));

    let pf = ModelSpace::<F>::build(ModelKind::Para);
    let (_, out) = pf.normalize_theta1(&pf.theta()[0]).unwrap();
    let s = pf.split_two_form(&out).unwrap();
    assert!(s.theta[0].magnitude() < 1e-12);
    assert!((s.theta[1].magnitude() - 1.0).abs() < 1e-12);
    let n = pf.frame().form_inner(&out, &out).unwrap();
    assert!((n - F::from(-2.0)).magnitude() < 1e-12);
}

#[test]
fn normalize_theta1_random() {
    let p = ModelSpace::<F>::build(ModelKind::Para);
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..100 {
        let theta: [F; 5] = std::array::from_fn(|_| rand_f(&mut rng));
        let xi = p.assemble_two_form(&theta, &F::zero());
        let (u, out) = p.normalize_theta1(&xi).unwrap();
        p.check_unitary(&u).unwrap();
        let s0 = p.split_two_form(&xi).unwrap();
        let s1 = p.split_two_form(&out).unwrap();
        assert!(s1.theta[0].magnitude() <= 1e-12);
        for k in 2..5 {
            assert!((s1.theta[k] - s0.theta[k]).magnitude() <= 1e-12);
        }
        let norm = |w: &KForm<F>| p.frame().form_inner(w, w).unwrap();
        assert!((norm(&s0.zero_part(&p)) - norm(&s1.zero_part(&p))).magnitude() <= 1e-12);
        assert!((norm(&s0.pm_part(&p)) - norm(&s1.pm_part(&p))).magnitude() <= 1e-12);
    }
}

#[test]
fn align_theta1_to_theta2() {
    let h = ModelSpace::<F>::build(ModelKind::Hermitian);
    let a = F::from(1.5);
    let source = h.theta()[0].scale(&a);
    let target = h.theta()[1].scale(&a);
    let u = h.align_hermitian(&source, &target).unwrap();
    assert!((h.induced_action(&u, &source).unwrap() - target).within(1e-9));
    // θ₃ is the rotation axis
    let t3 = h.induced_action(&u, &h.theta()[2]).unwrap();
    assert!((t3 - h.theta()[2].clone()).within(1e-9));
    let same = h.align_hermitian(&source, &source).unwrap();
    assert!((h.induced_action(&same, &source).unwrap() - source.clone()).within(1e-12));
    let antipodal = source.scale(&F::from(-1.0));
    let u = h.align_hermitian(&source, &antipodal).unwrap();
    assert!((h.induced_action(&u, &source).unwrap() - antipodal).within(1e-9));
}

#[test]
fn align_rejects_different_orbits() {
    let h = ModelSpace::<F>::build(ModelKind::Hermitian);
    let err = h.align_hermitian(&h.theta()[0], &h.theta()[3]).unwrap_err();
    assert!(matches!(err, Error::NotSameOrbit(..)));
}

#[test]
fn align_random_same_orbit_pairs() {
    let h = ModelSpace::<F>::build(ModelKind::Hermitian);
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..100 {
        let theta: [F; 5] = std::array::from_fn(|_| rand_f(&mut rng));
        let source = h.assemble_two_form(&theta, &F::zero());
        let target = h.induced_action(&rand_unitary_hermitian(&mut rng), &source).unwrap();
        let u = h.align_hermitian(&source, &target).unwrap();
        let residual = h.induced_action(&u, &source).unwrap() - target;
        assert!(residual.max_magnitude() <= 1e-9, "{}", residual.max_magnitude());
    }
}

fn rand_sym(rng: &mut ChaCha8Rng) -> SymTwoTensor<Q> {
    let mut s = Matrix4::zero();
    for i in 0..4 {
        for j in i..4 {
            let v = rand_q(rng);
            s.0[i][j] = v.clone();
            s.0[j][i] = v;
        }
    }
    SymTwoTensor(s)
}

#[test]
fn sym_split_examples_and_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    for kind in [ModelKind::Hermitian, ModelKind::Para] {
        let model = ModelSpace::<Q>::build(kind);
        let g = SymTwoTensor(model.frame().metric().clone());
        let split = model.split_sym_two_tensor(&g).unwrap();
        assert_eq!(split.trace_part, Q::one());
        assert_eq!(split.s0_part.0, Matrix4::zero());
        assert_eq!(split.spm_part.0, Matrix4::zero());
        let sigma = Q::from_i64(-kind.j_square_sign());
        for _ in 0..50 {
            let s = rand_sym(&mut rng);
            let split = model.split_sym_two_tensor(&s).unwrap();
            assert_eq!(split.reassemble(&model), s);
            assert_eq!(model.act_on_sym(&split.s0_part).0, split.s0_part.0.scale(&sigma));
            assert_eq!(model.act_on_sym(&split.spm_part).0, split.spm_part.0.scale(&-sigma.clone()));
            // s₀ and s± are trace-free
            let trace = |t: &SymTwoTensor<Q>| model.split_sym_two_tensor(t).unwrap().trace_part;
            assert!(trace(&split.s0_part).is_zero());
            assert!(trace(&split.spm_part).is_zero());
        }
    }
    // s(Jx, Jy) = −s(x, y) is pure S²₋ in the Hermitian model
    let h = ModelSpace::<Q>::build(ModelKind::Hermitian);
    let mut s = Matrix4::zero();
    s.0[0][1] = Q::one();
    s.0[1][0] = Q::one();
    let s = SymTwoTensor(s);
    assert_eq!(h.act_on_sym(&s).0, s.0.scale(&-Q::one()));
    let split = h.split_sym_two_tensor(&s).unwrap();
    assert_eq!(split.spm_part, s);
    assert!(split.trace_part.is_zero());
}

#[test]
fn integrability_examples() {
    let p = ModelSpace::<Q>::build(ModelKind::Para);
    assert!(p.integrability_predicates(&LieAlgebra4::abelian(ModelKind::Para)));
    let e3 = [Q::zero(), Q::zero(), Q::one(), Q::zero()];
    let bad = LieAlgebra4::from_brackets(ModelKind::Para, &[(0, 1, e3)]);
    assert!(!p.integrability_predicates(&bad));
}
