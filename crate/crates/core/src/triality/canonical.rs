//! Canonical forms of isotopes of quaternion algebras.
//!
//! Write `α = L_A R_B δ λ` and `β = L_C R_D ε μ` with `λ, μ ∈ {I, κ}`. The
//! group element `φ = R_t` (triality pair `(I, R_t)`) followed by the
//! nuclear element `w` brings the pair to the normal form of its class:
//!
//! ```text
//! class      normal form             t          w       a          b
//! ( 1,  1)   (L_a δ,   R_b ε)        BC         C⁻¹     A          (BC)⁻¹D(BC)
//! (-1,  1)   (R_a δ κ, R_b ε)        A⁻¹        C⁻¹     BC         A D A⁻¹
//! ( 1, -1)   (L_a δ,   L_b ε κ)      D⁻¹        DB      A          D B C D⁻¹
//! (-1, -1)   (L_a δ κ, R_b ε κ)      (BC)⁻¹     B       A(BC)⁻¹    D(BC)⁻¹
//! ```
//!
//! with `δ, ε` replaced by their conjugates under `R_t` (class `(1, 1)`),
//! `(L_A, R_A⁻¹)`, `(R_D⁻¹, L_D)` and `(L_{BC}, L_{BC})` respectively. What
//! remains is the action of inner automorphisms `c_s`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurwitz::{Algebra, Element};
use crate::isotope::Isotope;
use crate::linear::eigen::symmetric_eigen;
use crate::linear::matrix::Matrix;
use crate::linear::polar::{polar_decompose, unit_determinant, Orthonormal, Reflection};
use crate::linear::LinMap;
use crate::scalar::Scalar;
use crate::triality::conj::{inner_conj_solve, pair_conjugacy, proper_similitude_factor, so4_factor};
use crate::triality::TrialityTriple;

/// Version tag of the projective normalisation used by canonical forms.
pub const NORMALIZATION_RULE: &str = "v1";

/// Double-sign class `(i, j) ∈ {±1}²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Class(pub i32, pub i32);

impl Class {
    fn reflections(self) -> (Reflection, Reflection) {
        (Reflection::from_sign(self.0), Reflection::from_sign(self.1))
    }
}

impl std::fmt::Display for Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

#[derive(Clone, Debug)]
pub struct QuatCanonicalForm {
    pub class: Class,
    pub a: Element<f64>,
    pub b: Element<f64>,
    pub delta: LinMap<f64>,
    pub epsilon: LinMap<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompCanonicalForm<S: Scalar> {
    pub class: Class,
    pub a: Element<S>,
    pub b: Element<S>,
}

#[derive(Clone, Debug)]
pub enum IsoVerdict<S: Scalar> {
    Isomorphic { witness: Element<S>, residual: f64 },
    NotIsomorphic { reason: String },
    Inconclusive { witness: Element<S>, residual: f64 },
}

impl<S: Scalar> IsoVerdict<S> {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic { .. })
    }
}

/// The maps of the class's normal form.
fn normal_maps<S: Scalar>(
    class: Class,
    a: &Element<S>,
    b: &Element<S>,
    delta: &LinMap<S>,
    epsilon: &LinMap<S>,
) -> (LinMap<S>, LinMap<S>) {
    let alg = a.algebra();
    let kappa = LinMap::conjugation(alg);
    let (la, ra, lb, rb) = (LinMap::left(a), LinMap::right(a), LinMap::left(b), LinMap::right(b));
    match (class.0, class.1) {
        (1, 1) => (&la * delta, &rb * epsilon),
        (-1, 1) => (&(&ra * delta) * &kappa, &rb * epsilon),
        (1, -1) => (&la * delta, &(&lb * epsilon) * &kappa),
        _ => (&(&la * delta) * &kappa, &(&rb * epsilon) * &kappa),
    }
}

struct Reduction<S: Scalar> {
    a: Element<S>,
    b: Element<S>,
    t: Element<S>,
    w: Element<S>,
    /// `δ ↦ m δ m⁻¹` and `ε ↦ n ε n⁻¹` carry the shape factors along.
    m_delta: LinMap<S>,
    m_epsilon: LinMap<S>,
}

fn reduce<S: Scalar>(
    class: Class,
    (a0, b0): (&Element<S>, &Element<S>),
    (c0, d0): (&Element<S>, &Element<S>),
) -> Result<Reduction<S>> {
    let inv = |x: &Element<S>| x.inverse();
    Ok(match (class.0, class.1) {
        (1, 1) => {
            let t = b0 * c0;
            let b = &(&inv(&t)? * d0) * &t;
            let m = LinMap::right(&t);
            Reduction { a: a0.clone(), b, w: inv(c0)?, m_delta: m.clone(), m_epsilon: m, t }
        }
        (-1, 1) => {
            let t = inv(a0)?;
            Reduction {
                a: b0 * c0,
                b: &(a0 * d0) * &t,
                w: inv(c0)?,
                m_delta: LinMap::left(a0),
                m_epsilon: LinMap::right(&t),
                t,
            }
        }
        (1, -1) => {
            let t = inv(d0)?;
            Reduction {
                a: a0.clone(),
                b: &(&(d0 * b0) * c0) * &t,
                w: d0 * b0,
                m_delta: LinMap::right(&t),
                m_epsilon: LinMap::left(d0),
                t,
            }
        }
        _ => {
            let bc = b0 * c0;
            let t = inv(&bc)?;
            let m = LinMap::left(&bc);
            Reduction { a: a0 * &t, b: d0 * &t, w: b0.clone(), m_delta: m.clone(), m_epsilon: m, t }
        }
    })
}

fn conjugate_by<S: Scalar>(m: &LinMap<S>, x: &LinMap<S>) -> Result<LinMap<S>> {
    Ok(&(m * x) * &m.inverse()?)
}

/// Transports `iso` along `R_t`, applies the nuclear element `w`, and
/// checks that the result is proportional to the normal-form maps.
fn check_reduction<S: Scalar>(iso: &Isotope<S>, red: &Reduction<S>, expected: &(LinMap<S>, LinMap<S>)) -> Result<()> {
    let alg = iso.algebra();
    let phi = LinMap::right(&red.t);
    let triple = TrialityTriple::new(phi.clone(), LinMap::identity(alg), phi.clone());
    let target = iso.transport(&phi, &triple)?.target;
    let gamma = &LinMap::right(&red.w).inverse()? * target.alpha();
    let delta = &LinMap::left(&red.w) * target.beta();
    if gamma.ratio_to(&expected.0).is_none() || delta.ratio_to(&expected.1).is_none() {
        return Err(Error::SelfCheck("the reduced pair does not match the normal form".into()));
    }
    Ok(())
}

/// Canonical form of an isotope of a Euclidean quaternion algebra.
pub fn quaternion_canonical(iso: &Isotope<f64>) -> Result<QuatCanonicalForm> {
    let alg = iso.algebra();
    if alg.dim() != 4 {
        return Err(Error::WrongDimension { expected: 4, got: alg.dim() });
    }
    let pa = polar_decompose(iso.alpha())?;
    let pb = polar_decompose(iso.beta())?;
    let class = Class(pa.reflection.sign(), pb.reflection.sign());
    let ab = so4_factor(&pa.rotation)?;
    let cd = so4_factor(&pb.rotation)?;
    let red = reduce(class, (&ab.0, &ab.1), (&cd.0, &cd.1))?;
    let delta = conjugate_by(&red.m_delta, &pa.positive)?;
    let epsilon = conjugate_by(&red.m_epsilon, &pb.positive)?;
    check_reduction(iso, &red, &normal_maps(class, &red.a, &red.b, &delta, &epsilon))?;
    Ok(QuatCanonicalForm {
        class,
        a: red.a.projective_normal()?,
        b: red.b.projective_normal()?,
        delta: symmetrise(&unit_determinant(&delta).0)?,
        epsilon: symmetrise(&unit_determinant(&epsilon).0)?,
    })
}

/// Removes rounding asymmetry (in the norm's inner product).
fn symmetrise(m: &LinMap<f64>) -> Result<LinMap<f64>> {
    let basis = Orthonormal::new(m.algebra())?;
    let s = basis.push(m.matrix());
    LinMap::new(m.algebra(), basis.pull(&s.add(&s.transpose()).scale(&0.5)))
}

impl QuatCanonicalForm {
    /// The isotope given by the normal-form maps.
    pub fn rebuild(&self) -> Result<Isotope<f64>> {
        let (alpha, beta) = normal_maps(self.class, &self.a, &self.b, &self.delta, &self.epsilon);
        Isotope::new(alpha, beta)
    }

    /// The form transformed by `c_s`.
    pub fn act(&self, s: &Element<f64>) -> Result<QuatCanonicalForm> {
        let c = LinMap::inner(s)?;
        Ok(QuatCanonicalForm {
            class: self.class,
            a: c.apply(&self.a).projective_normal()?,
            b: c.apply(&self.b).projective_normal()?,
            delta: conjugate_by(&c, &self.delta)?,
            epsilon: conjugate_by(&c, &self.epsilon)?,
        })
    }
}

/// Distance from `c_s(f1)` to `f2`, with `a` and `b` compared up to sign.
fn action_residual(f1: &QuatCanonicalForm, f2: &QuatCanonicalForm, s: &Element<f64>) -> f64 {
    let Ok(c) = LinMap::inner(s) else { return f64::INFINITY };
    let Ok(c_inv) = c.inverse() else { return f64::INFINITY };
    let up_to_sign = |x: &Element<f64>, y: &Element<f64>| {
        let d = |sign: f64| x.coords().iter().zip(y.coords()).map(|(p, q)| (p - sign * q).abs()).fold(0.0, f64::max);
        d(1.0).min(d(-1.0))
    };
    let rel = |m: &LinMap<f64>, target: &LinMap<f64>| m.distance(target) / 1f64.max(target.matrix().max_abs());
    let sa = c.apply(&f1.a);
    let sb = c.apply(&f1.b);
    let norm = |x: &Element<f64>| x.norm().abs().sqrt().max(f64::MIN_POSITIVE);
    [
        up_to_sign(&sa.scale(&(1.0 / norm(&sa))), &f2.a),
        up_to_sign(&sb.scale(&(1.0 / norm(&sb))), &f2.b),
        rel(&(&(&c * &f1.delta) * &c_inv), &f2.delta),
        rel(&(&(&c * &f1.epsilon) * &c_inv), &f2.epsilon),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Residual band in which a verdict is reported as inconclusive.
const INCONCLUSIVE_FACTOR: f64 = 1e3;

/// Searches for `s` with `c_s · f1 = f2`.
pub fn quat_iso_test(f1: &QuatCanonicalForm, f2: &QuatCanonicalForm) -> IsoVerdict<f64> {
    if f1.class != f2.class {
        return IsoVerdict::NotIsomorphic { reason: format!("classes {} and {} differ", f1.class, f2.class) };
    }
    let alg = f1.a.algebra();
    let tol = alg.tolerance().residual;
    let eval = |s: &Element<f64>| action_residual(f1, f2, s);
    let mut best = (alg.one(), eval(&alg.one()));
    let consider = |s: Element<f64>, best: &mut (Element<f64>, f64)| {
        let r = eval(&s);
        if r < best.1 {
            *best = (s, r);
        }
    };
    if best.1 >= tol {
        let null_tol = tol.sqrt();
        for sa in [1.0, -1.0] {
            for sb in [1.0, -1.0] {
                let system =
                    f1.a.right_matrix()
                        .matrix()
                        .sub(&f2.a.left_matrix().matrix().scale(&sa))
                        .vstack(&f1.b.right_matrix().matrix().sub(&f2.b.left_matrix().matrix().scale(&sb)));
                let null: Vec<Element<f64>> =
                    system.nullspace(null_tol).into_iter().filter_map(|v| alg.element(v).ok()).collect();
                match null.len() {
                    0 => {}
                    1 => consider(null[0].clone(), &mut best),
                    2 => consider(circle_search(&null[0], &null[1], &eval), &mut best),
                    _ => {
                        for s in eigen_alignments(f1, f2) {
                            consider(s, &mut best);
                        }
                    }
                }
            }
        }
    }
    let (s, residual) = best;
    let witness = s.projective_normal().unwrap_or(s);
    if residual < tol {
        IsoVerdict::Isomorphic { witness, residual }
    } else if residual < tol * INCONCLUSIVE_FACTOR {
        IsoVerdict::Inconclusive { witness, residual }
    } else {
        IsoVerdict::NotIsomorphic { reason: format!("no conjugating element found (best residual {residual:e})") }
    }
}

/// Minimises `eval` over `cos θ u + sin θ v` by dense sampling and golden
/// section refinement.
fn circle_search(u: &Element<f64>, v: &Element<f64>, eval: &impl Fn(&Element<f64>) -> f64) -> Element<f64> {
    let point = |theta: f64| &u.scale(&theta.cos()) + &v.scale(&theta.sin());
    let samples = 1024;
    let step = std::f64::consts::PI / samples as f64;
    let (mut best_theta, mut best) = (0.0, f64::INFINITY);
    for k in 0..samples {
        let theta = k as f64 * step;
        let r = eval(&point(theta));
        if r < best {
            (best_theta, best) = (theta, r);
        }
    }
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best_theta - step, best_theta + step);
    for _ in 0..100 {
        let x1 = hi - golden * (hi - lo);
        let x2 = lo + golden * (hi - lo);
        if eval(&point(x1)) < eval(&point(x2)) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let refined = point((lo + hi) / 2.0);
    if eval(&refined) < best {
        refined
    } else {
        point(best_theta)
    }
}

/// Candidates `s` whose inner automorphism carries an eigenbasis of
/// `f1.δ` (or `f1.ε`) to one of `f2.δ` (or `f2.ε`).
fn eigen_alignments(f1: &QuatCanonicalForm, f2: &QuatCanonicalForm) -> Vec<Element<f64>> {
    let alg = f1.a.algebra();
    let Ok(basis) = Orthonormal::new(alg) else { return Vec::new() };
    let mut out = Vec::new();
    for (m1, m2) in [(&f1.delta, &f2.delta), (&f1.epsilon, &f2.epsilon)] {
        let tol = alg.tolerance().residual;
        let (Ok(e1), Ok(e2)) =
            (symmetric_eigen(&basis.push(m1.matrix()), tol), symmetric_eigen(&basis.push(m2.matrix()), tol))
        else {
            continue;
        };
        for pattern in 0..16u32 {
            let signs: Vec<f64> = (0..4).map(|k| if pattern >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let r = e2.vectors.mul(&Matrix::diagonal(&signs)).mul(&e1.vectors.transpose());
            let fixes_one = (r[(0, 0)] - 1.0).abs() < 1e-6;
            if !fixes_one || r.determinant() < 0.0 {
                continue;
            }
            let Ok(map) = LinMap::new(alg, basis.pull(&r)) else { continue };
            if let Ok(s) = inner_conj_solve(&map) {
                out.push(s);
            }
        }
    }
    out
}

/// Canonical form of a four-dimensional composition isotope `A_{α,β}`.
pub fn comp_canonical<S: Scalar>(iso: &Isotope<S>) -> Result<CompCanonicalForm<S>> {
    let alg = iso.algebra();
    if alg.dim() != 4 {
        return Err(Error::WrongDimension { expected: 4, got: alg.dim() });
    }
    let cert = iso.is_composition()?;
    let class = Class(if cert.alpha.proper { 1 } else { -1 }, if cert.beta.proper { 1 } else { -1 });
    let (lambda, mu) = class.reflections();
    let ab = proper_similitude_factor(&(iso.alpha() * &lambda.map(alg)))?;
    let cd = proper_similitude_factor(&(iso.beta() * &mu.map(alg)))?;
    let red = reduce(class, (&ab.0, &ab.1), (&cd.0, &cd.1))?;
    let id = LinMap::identity(alg);
    check_reduction(iso, &red, &normal_maps(class, &red.a, &red.b, &id, &id))?;
    Ok(CompCanonicalForm { class, a: red.a.projective_normal()?, b: red.b.projective_normal()? })
}

impl<S: Scalar> CompCanonicalForm<S> {
    pub fn rebuild(&self) -> Result<Isotope<S>> {
        let id = LinMap::identity(self.a.algebra());
        let (alpha, beta) = normal_maps(self.class, &self.a, &self.b, &id, &id);
        Isotope::new(alpha, beta)
    }
}

/// Isomorphism test for composition canonical forms: equal classes and
/// simultaneously conjugate pairs.
pub fn comp_iso_test<S: Scalar>(f1: &CompCanonicalForm<S>, f2: &CompCanonicalForm<S>) -> IsoVerdict<S> {
    if f1.class != f2.class {
        return IsoVerdict::NotIsomorphic { reason: format!("classes {} and {} differ", f1.class, f2.class) };
    }
    match pair_conjugacy((&f1.a, &f1.b), (&f2.a, &f2.b)) {
        Ok(witness) => IsoVerdict::Isomorphic { witness, residual: 0.0 },
        Err(e) => IsoVerdict::NotIsomorphic { reason: e.to_string() },
    }
}

/// Textual description of the geometric picture: the lines through `a`
/// and `b`, and the principal axes of the unit-determinant ellipsoids of
/// `δ` and `ε`.
pub fn ellipsoid_report(form: &QuatCanonicalForm) -> Result<String> {
    let alg: &Algebra<f64> = form.a.algebra();
    let basis = Orthonormal::new(alg)?;
    let mut out = String::new();
    let fmt_vec = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ");
    writeln!(out, "class {}", form.class).ok();
    writeln!(out, "line a: [{}]", fmt_vec(form.a.coords())).ok();
    writeln!(out, "line b: [{}]", fmt_vec(form.b.coords())).ok();
    for (name, m) in [("delta", &form.delta), ("epsilon", &form.epsilon)] {
        let eig = symmetric_eigen(&basis.push(m.matrix()), alg.tolerance().residual)?;
        let product: f64 = eig.values.iter().product();
        writeln!(out, "ellipsoid {name}: semi-axes product {product:.6}").ok();
        for (k, value) in eig.values.iter().enumerate() {
            writeln!(out, "  axis {k}: length {value:.6} along [{}]", fmt_vec(&eig.vectors.column(k))).ok();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::HurwitzAlgebra;
    use crate::linear::random::{random_invertible, random_spd, random_unit, seeded_rng};
    use crate::scalar::Rational;

    fn quaternions() -> Algebra<f64> {
        HurwitzAlgebra::new(vec![-1.0, -1.0]).unwrap()
    }

    fn exact_quaternions() -> Algebra<Rational> {
        HurwitzAlgebra::new(vec![Rational::from_i64(-1), Rational::from_i64(-1)]).unwrap()
    }

    #[test]
    fn trivial_isotope() {
        let h = quaternions();
        let f = quaternion_canonical(&Isotope::trivial(&h)).unwrap();
        assert_eq!(f.class, Class(1, 1));
        assert!(f.a.approx_eq(&h.one()) && f.b.approx_eq(&h.one()));
        assert!(f.delta.distance(&LinMap::identity(&h)) < 1e-12);
        assert!(f.epsilon.distance(&LinMap::identity(&h)) < 1e-12);
    }

    #[test]
    fn rotation_example() {
        let h = quaternions();
        let alpha = &LinMap::left(&h.basis(1)) * &LinMap::right(&h.basis(2));
        let beta = LinMap::right(&h.basis(3));
        let f = quaternion_canonical(&Isotope::new(alpha, beta).unwrap()).unwrap();
        assert_eq!(f.class, Class(1, 1));
        assert!(f.a.approx_eq(&h.basis(1)), "{:?}", f.a);
        assert!(f.b.approx_eq(&h.basis(3)), "{:?}", f.b);
    }

    #[test]
    fn conjugation_example() {
        let h = quaternions();
        let f = quaternion_canonical(&Isotope::new(LinMap::conjugation(&h), LinMap::identity(&h)).unwrap()).unwrap();
        assert_eq!(f.class, Class(-1, 1));
        assert!(f.a.approx_eq(&h.one()) && f.b.approx_eq(&h.one()));
    }

    #[test]
    fn canonical_form_rebuilds_an_isomorphic_isotope() {
        let h = quaternions();
        let mut rng = seeded_rng(5);
        for _ in 0..20 {
            let iso = Isotope::new(random_invertible(&h, &mut rng), random_invertible(&h, &mut rng)).unwrap();
            let f = quaternion_canonical(&iso).unwrap();
            let g = quaternion_canonical(&f.rebuild().unwrap()).unwrap();
            assert!(quat_iso_test(&f, &g).is_isomorphic());
        }
    }

    #[test]
    fn iso_test_examples() {
        let h = quaternions();
        let mut rng = seeded_rng(6);
        let iso = Isotope::new(random_invertible(&h, &mut rng), random_invertible(&h, &mut rng)).unwrap();
        let f = quaternion_canonical(&iso).unwrap();
        match quat_iso_test(&f, &f) {
            IsoVerdict::Isomorphic { witness, .. } => assert!(witness.approx_eq(&h.one())),
            other => panic!("{other:?}"),
        }
        let s0 = random_unit(&h, &mut rng);
        let g = f.act(&s0).unwrap();
        match quat_iso_test(&f, &g) {
            IsoVerdict::Isomorphic { witness, residual } => {
                assert!(residual < 1e-8);
                let expected = s0.projective_normal().unwrap();
                let gap = (&witness - &expected).coords().iter().fold(0.0f64, |m, x| m.max(x.abs()));
                assert!(gap < 1e-7, "{witness:?} vs {expected:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn iso_test_on_a_stabiliser_circle() {
        let h = quaternions();
        let id = LinMap::identity(&h);
        let form = |b: usize| QuatCanonicalForm {
            class: Class(1, 1),
            a: h.basis(1),
            b: h.basis(b),
            delta: id.clone(),
            epsilon: id.clone(),
        };
        match quat_iso_test(&form(2), &form(3)) {
            IsoVerdict::Isomorphic { witness, .. } => {
                let c = LinMap::inner(&witness).unwrap();
                assert!(c.apply(&h.basis(1)).approx_eq(&h.basis(1)));
                let image = c.apply(&h.basis(2));
                assert!(image.approx_eq(&h.basis(3)) || image.approx_eq(&-&h.basis(3)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn iso_test_with_central_pairs() {
        let h = quaternions();
        let mut rng = seeded_rng(7);
        let delta = unit_determinant(&random_spd(&h, &mut rng).unwrap()).0;
        let epsilon = unit_determinant(&random_spd(&h, &mut rng).unwrap()).0;
        let f = QuatCanonicalForm { class: Class(1, 1), a: h.one(), b: h.one(), delta, epsilon };
        let g = f.act(&random_unit(&h, &mut rng)).unwrap();
        assert!(quat_iso_test(&f, &g).is_isomorphic());
        let other = QuatCanonicalForm { class: Class(1, -1), ..g.clone() };
        assert!(matches!(quat_iso_test(&f, &other), IsoVerdict::NotIsomorphic { .. }));
    }

    #[test]
    fn composition_examples() {
        let h = exact_quaternions();
        let id = LinMap::identity(&h);
        let f = comp_canonical(&Isotope::trivial(&h)).unwrap();
        assert_eq!((f.class, f.a.clone(), f.b.clone()), (Class(1, 1), h.one(), h.one()));
        let alpha = &LinMap::left(&h.basis(1)) * &LinMap::right(&h.basis(2));
        let f = comp_canonical(&Isotope::new(alpha, LinMap::right(&h.basis(3))).unwrap()).unwrap();
        assert_eq!((f.class, f.a.clone(), f.b.clone()), (Class(1, 1), h.basis(1), h.basis(3)));
        let f = comp_canonical(&Isotope::new(LinMap::conjugation(&h), id.clone()).unwrap()).unwrap();
        assert_eq!((f.class, f.a.clone(), f.b.clone()), (Class(-1, 1), h.one(), h.one()));
        let bad = Isotope::new(
            LinMap::new(
                &h,
                Matrix::diagonal(&[
                    Rational::from_i64(2),
                    Rational::from_i64(1),
                    Rational::from_i64(1),
                    Rational::from_i64(1),
                ]),
            )
            .unwrap(),
            id,
        )
        .unwrap();
        assert_eq!(comp_canonical(&bad).unwrap_err(), Error::NotComposition("alpha"));
    }

    #[test]
    fn composition_forms_rebuild() {
        let h = exact_quaternions();
        let mut rng = seeded_rng(8);
        for class in [Class(1, 1), Class(-1, 1), Class(1, -1), Class(-1, -1)] {
            let (l, m) = class.reflections();
            let alpha = &(&LinMap::left(&h.random_invertible(&mut rng))
                * &LinMap::right(&h.random_invertible(&mut rng)))
                * &l.map(&h);
            let beta = &(&LinMap::left(&h.random_invertible(&mut rng))
                * &LinMap::right(&h.random_invertible(&mut rng)))
                * &m.map(&h);
            let f = comp_canonical(&Isotope::new(alpha, beta).unwrap()).unwrap();
            assert_eq!(f.class, class);
            let g = comp_canonical(&f.rebuild().unwrap()).unwrap();
            assert!(comp_iso_test(&f, &g).is_isomorphic());
        }
    }

    #[test]
    fn report_mentions_axes() {
        let h = quaternions();
        let f = quaternion_canonical(&Isotope::trivial(&h)).unwrap();
        let report = ellipsoid_report(&f).unwrap();
        assert!(report.contains("ellipsoid delta"));
        assert!(report.contains("semi-axes product 1.000000"));
    }
}
