//! Triality components of similitudes and the classification of isotopes
//! of quaternion and four-dimensional composition algebras.

pub mod canonical;
pub mod conj;
pub mod solver;

use std::any::Any;

use crate::error::{Error, Result};
use crate::hurwitz::Element;
use crate::linear::similitude::similitude_deviation;
use crate::linear::{LinMap, SimilitudeCert};
use crate::scalar::{Backend, Scalar};

pub use canonical::{
    comp_canonical, comp_iso_test, ellipsoid_report, quat_iso_test, quaternion_canonical, CompCanonicalForm,
    IsoVerdict, QuatCanonicalForm,
};
pub use conj::{inner_conj_solve, pair_conjugacy, proper_similitude_factor, so4_factor};
pub use solver::SolverOptions;

/// Maps with `φ(xy) = φ₁(x) φ₂(y)`.
#[derive(Clone, Debug)]
pub struct TrialityTriple<S: Scalar> {
    pub phi: LinMap<S>,
    pub phi1: LinMap<S>,
    pub phi2: LinMap<S>,
    /// Result of [`verify_triality`] when the triple was built.
    pub residual: f64,
}

impl<S: Scalar> TrialityTriple<S> {
    pub fn new(phi: LinMap<S>, phi1: LinMap<S>, phi2: LinMap<S>) -> Self {
        let mut t = TrialityTriple { phi, phi1, phi2, residual: 0.0 };
        t.residual = verify_triality(&t);
        t
    }
}

/// Max over basis pairs of `|φ(e_i e_j) - φ₁(e_i) φ₂(e_j)|`, relative to
/// `max(1, ‖φ‖)`.
pub fn triality_defect<S: Scalar>(phi: &LinMap<S>, phi1: &LinMap<S>, phi2: &LinMap<S>) -> f64 {
    let alg = phi.algebra();
    let images1: Vec<Element<S>> = (0..alg.dim()).map(|i| phi1.apply(&alg.basis(i))).collect();
    let images2: Vec<Element<S>> = (0..alg.dim()).map(|j| phi2.apply(&alg.basis(j))).collect();
    let mut worst: f64 = 0.0;
    for (i, x) in images1.iter().enumerate() {
        for (j, y) in images2.iter().enumerate() {
            let lhs = phi.apply(&(&alg.basis(i) * &alg.basis(j)));
            let rhs = x * y;
            for (a, b) in lhs.coords().iter().zip(rhs.coords()) {
                worst = worst.max((a.clone() - b.clone()).abs_f64());
            }
        }
    }
    worst / 1f64.max(phi.matrix().max_abs())
}

/// Relative distance between `m` and `candidate`, infinite if the candidate
/// could not be formed.
fn relative_distance<S: Scalar>(m: &LinMap<S>, candidate: Result<LinMap<S>>) -> f64 {
    match candidate {
        Ok(c) => m.distance(&c) / 1f64.max(m.matrix().max_abs()),
        Err(_) => f64::INFINITY,
    }
}

/// Largest of the triality defect, the deviations from the consistency
/// relations `φ₁ = R_{φ₂(1)}⁻¹ φ`, `φ₂ = L_{φ₁(1)}⁻¹ φ`, and the similitude
/// deviations of `φ₁` and `φ₂`.
pub fn verify_triality<S: Scalar>(t: &TrialityTriple<S>) -> f64 {
    let defect = triality_defect(&t.phi, &t.phi1, &t.phi2);
    let c1 = relative_distance(&t.phi1, LinMap::right(&t.phi2.image_of_one()).inverse().map(|r| &r * &t.phi));
    let c2 = relative_distance(&t.phi2, LinMap::left(&t.phi1.image_of_one()).inverse().map(|l| &l * &t.phi));
    let s1 = similitude_deviation(&t.phi1);
    let s2 = similitude_deviation(&t.phi2);
    [defect, c1, c2, s1, s2].into_iter().fold(0.0, f64::max)
}

fn cast<T: 'static, U: 'static>(value: T) -> Option<U> {
    let boxed: Box<dyn Any> = Box::new(value);
    boxed.downcast::<U>().ok().map(|b| *b)
}

pub fn triality_components<S: Scalar>(phi: &LinMap<S>, cert: &SimilitudeCert<S>) -> Result<TrialityTriple<S>> {
    triality_components_with(phi, cert, &SolverOptions::default())
}

/// Triality components of a similitude. In dimension at most 4 this is the
/// pair `(R_{φ(1)}⁻¹ φ, φ)`; octonionic similitudes go through the numerical
/// solver.
pub fn triality_components_with<S: Scalar>(
    phi: &LinMap<S>,
    cert: &SimilitudeCert<S>,
    options: &SolverOptions,
) -> Result<TrialityTriple<S>> {
    let alg = phi.algebra();
    if alg.dim() < 2 {
        return Err(Error::Dim1);
    }
    if alg.dim() >= 4 && !cert.proper {
        return Err(Error::ImproperSimilitude);
    }
    let c = phi.image_of_one();
    if !c.is_invertible() {
        return Err(Error::NotInvertible { norm: c.norm().to_f64() });
    }
    if alg.dim() <= 4 {
        let phi1 = &LinMap::right(&c.inverse()?) * phi;
        return Ok(TrialityTriple::new(phi.clone(), phi1, phi.clone()));
    }
    match S::BACKEND {
        Backend::Exact => Err(Error::ExactUnsupported("octonionic triality")),
        Backend::Approx => {
            let phi64: LinMap<f64> = cast(phi.clone()).expect("approximate backend is f64");
            let triple = solver::solve_triality(&phi64, options)?;
            Ok(cast(triple).expect("approximate backend is f64"))
        }
    }
}

/// The nuclear element `w` with `t₂ = (R_w⁻¹ t₁.φ₁, L_w t₁.φ₂)`.
pub fn triality_align<S: Scalar>(t1: &TrialityTriple<S>, t2: &TrialityTriple<S>) -> Result<Element<S>> {
    if !t1.phi.approx_eq(&t2.phi) {
        return Err(Error::NotRelated("the triples belong to different maps".into()));
    }
    let w = (&t2.phi2 * &t1.phi2.inverse()?).image_of_one();
    if !w.is_invertible() {
        return Err(Error::NotRelated("candidate w has zero norm".into()));
    }
    if !w.in_nucleus() {
        return Err(Error::NotRelated("candidate w is not in the nucleus".into()));
    }
    if !t2.phi1.approx_eq(&(&LinMap::right(&w).inverse()? * &t1.phi1)) {
        return Err(Error::NotRelated("first components differ by more than R_w^-1".into()));
    }
    if !t2.phi2.approx_eq(&(&LinMap::left(&w) * &t1.phi2)) {
        return Err(Error::NotRelated("second components differ by more than L_w".into()));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::{Algebra, HurwitzAlgebra};
    use crate::linear::random::{random_proper_similitude, random_unit, seeded_rng};
    use crate::linear::similitude_check;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn quaternions() -> Algebra<Rational> {
        HurwitzAlgebra::new(vec![q(-1), q(-1)]).unwrap()
    }

    fn components<S: Scalar>(phi: &LinMap<S>) -> TrialityTriple<S> {
        triality_components(phi, &similitude_check(phi).unwrap()).unwrap()
    }

    #[test]
    fn identity_triple() {
        let h = quaternions();
        let id = LinMap::identity(&h);
        let t = components(&id);
        assert_eq!((t.phi1.clone(), t.phi2.clone(), t.residual), (id.clone(), id.clone(), 0.0));
        assert_eq!(verify_triality(&TrialityTriple::new(id.clone(), id.clone(), id)), 0.0);
    }

    #[test]
    fn left_multiplication_triple() {
        let h = quaternions();
        let a = h.element(vec![q(1), q(2), q(0), q(-1)]).unwrap();
        let la = LinMap::left(&a);
        let t = components(&la);
        assert_eq!(t.residual, 0.0);
        let (x, y) = (h.basis(2), &h.basis(1) + &h.basis(3));
        assert_eq!(&t.phi1.apply(&x) * &t.phi2.apply(&y), &a * &(&x * &y));
    }

    #[test]
    fn exact_quaternion_triples_are_exact() {
        let h = quaternions();
        let mut rng = seeded_rng(1);
        for _ in 0..50 {
            let t = components(&random_proper_similitude(&h, &mut rng));
            assert_eq!(verify_triality(&t), 0.0);
            assert_eq!(t.phi1, &LinMap::right(&t.phi2.image_of_one()).inverse().unwrap() * &t.phi);
            assert_eq!(t.phi2, &LinMap::left(&t.phi1.image_of_one()).inverse().unwrap() * &t.phi);
        }
    }

    #[test]
    fn binary_algebras_accept_conjugation() {
        let c = HurwitzAlgebra::new(vec![q(-3)]).unwrap();
        let kappa = LinMap::conjugation(&c);
        let t = components(&kappa);
        assert_eq!(t.residual, 0.0);
    }

    #[test]
    fn perturbation_is_measured() {
        let h = quaternions().to_approx();
        let mut rng = seeded_rng(2);
        let t = components(&random_proper_similitude(&h, &mut rng));
        assert!(t.residual < 1e-12);
        let mut m = t.phi2.matrix().clone();
        m[(1, 2)] += 1e-3;
        let bumped = TrialityTriple::new(t.phi.clone(), t.phi1.clone(), LinMap::new(&h, m).unwrap());
        assert!(bumped.residual > 1e-5 && bumped.residual < 1e-1, "{}", bumped.residual);
    }

    #[test]
    fn improper_maps_are_rejected() {
        let h = quaternions();
        let kappa = LinMap::conjugation(&h);
        let err = triality_components(&kappa, &similitude_check(&kappa).unwrap()).unwrap_err();
        assert_eq!(err, Error::ImproperSimilitude);
    }

    #[test]
    fn alignment() {
        let h = quaternions();
        let mut rng = seeded_rng(3);
        let t1 = components(&random_proper_similitude(&h, &mut rng));
        assert_eq!(triality_align(&t1, &t1).unwrap(), h.one());
        let w = h.basis(1);
        let t2 = TrialityTriple::new(
            t1.phi.clone(),
            &LinMap::right(&w).inverse().unwrap() * &t1.phi1,
            &LinMap::left(&w) * &t1.phi2,
        );
        assert_eq!(t2.residual, 0.0);
        assert_eq!(triality_align(&t1, &t2).unwrap(), w);
    }

    #[test]
    fn octonion_alignment_with_scalar_w() {
        let o = HurwitzAlgebra::new(vec![-1.0; 3]).unwrap();
        let mut rng = seeded_rng(4);
        let a = random_unit(&o, &mut rng);
        let phi = &LinMap::left(&a) * &LinMap::right(&a);
        let t1 = TrialityTriple::new(phi.clone(), LinMap::left(&a), LinMap::right(&a));
        assert!(t1.residual < 1e-12);
        let w = o.scalar(2.0);
        let t2 = TrialityTriple::new(phi, t1.phi1.scale(&0.5), t1.phi2.scale(&2.0));
        let found = triality_align(&t1, &t2).unwrap();
        assert!(found.approx_eq(&w));
        let e1 = o.basis(1);
        let t3 = TrialityTriple::new(
            t1.phi.clone(),
            &LinMap::right(&e1).inverse().unwrap() * &t1.phi1,
            &LinMap::left(&e1) * &t1.phi2,
        );
        assert!(matches!(triality_align(&t1, &t3), Err(Error::NotRelated(_))));
    }

    #[test]
    fn exact_octonions_need_the_approximate_solver() {
        let o = HurwitzAlgebra::new(vec![q(-1); 3]).unwrap();
        let id = LinMap::identity(&o);
        assert!(matches!(triality_components(&id, &similitude_check(&id).unwrap()), Err(Error::ExactUnsupported(_))));
    }
}
