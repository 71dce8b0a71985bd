//! Inner automorphisms of quaternion algebras: solving `ψ = c_p`, the
//! factorisation `φ = L_p R_q` of proper similitudes, and simultaneous
//! conjugacy of pairs.

use crate::error::{Error, Result};
use crate::hurwitz::Element;
use crate::linear::matrix::Matrix;
use crate::linear::polar::special_orthogonal_deviation;
use crate::linear::LinMap;
use crate::scalar::{Backend, Scalar};

fn require_quaternion<S: Scalar>(m: &LinMap<S>) -> Result<()> {
    match m.dim() {
        4 => Ok(()),
        got => Err(Error::WrongDimension { expected: 4, got }),
    }
}

/// Coefficient matrix of `s ↦ s x - ρ y s`.
fn intertwiner<S: Scalar>(x: &Element<S>, rho: &S, y: &Element<S>) -> Matrix<S> {
    x.right_matrix().matrix().sub(&y.left_matrix().matrix().scale(rho))
}

/// Some invertible element of the span of `basis`, if there is one. A
/// nonzero quadratic form is nonzero on a basis vector or on the sum of two.
fn invertible_in_span<S: Scalar>(basis: &[Element<S>]) -> Option<Element<S>> {
    let mut candidates: Vec<Element<S>> = basis.to_vec();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            candidates.push(&basis[i] + &basis[j]);
        }
    }
    candidates.into_iter().find(Element::is_invertible)
}

/// `p` with `ψ(x) = p x p⁻¹`, normalised projectively.
pub fn inner_conj_solve<S: Scalar>(psi: &LinMap<S>) -> Result<Element<S>> {
    require_quaternion(psi)?;
    let alg = psi.algebra();
    let one = S::one();
    let system = (0..4)
        .map(|j| intertwiner(&alg.basis(j), &one, &psi.apply(&alg.basis(j))))
        .reduce(|acc, m| acc.vstack(&m))
        .expect("four blocks");
    let null = system.nullspace(alg.tolerance().residual);
    match null.len() {
        0 => return Err(Error::NotInner("the intertwining system has only the zero solution".into())),
        1 => {}
        nullity => return Err(Error::Degenerate { nullity }),
    }
    let p = alg.element(null.into_iter().next().expect("nullity one"))?;
    if !p.is_invertible() {
        return Err(Error::NotInner("the intertwining element has zero norm".into()));
    }
    let p = p.projective_normal()?;
    if !LinMap::inner(&p)?.approx_eq(psi) {
        return Err(Error::NotInner("L_p R_p^-1 does not reproduce the map".into()));
    }
    Ok(p)
}

/// `(p, q)` with `φ = L_p R_q` for a proper similitude of a quaternion
/// algebra; `p` is normalised projectively and `q = p⁻¹ φ(1)`.
pub fn proper_similitude_factor<S: Scalar>(phi: &LinMap<S>) -> Result<(Element<S>, Element<S>)> {
    require_quaternion(phi)?;
    let c = phi.image_of_one();
    if !c.is_invertible() {
        return Err(Error::NotInner("the image of 1 has zero norm".into()));
    }
    let psi = &LinMap::right(&c.inverse()?) * phi;
    let p = inner_conj_solve(&psi)?;
    let q = &p.inverse()? * &c;
    if !(&LinMap::left(&p) * &LinMap::right(&q)).approx_eq(phi) {
        return Err(Error::NotInner("L_p R_q does not reproduce the map".into()));
    }
    Ok((p, q))
}

/// Unit `(p, q)` with `ζ = L_p R_q` for special orthogonal `ζ` of a
/// Euclidean quaternion algebra; the sign of the pair is fixed by making the
/// first nonzero coordinate of `p` positive.
pub fn so4_factor(zeta: &LinMap<f64>) -> Result<(Element<f64>, Element<f64>)> {
    require_quaternion(zeta)?;
    let tol = zeta.algebra().tolerance().residual;
    let deviation = special_orthogonal_deviation(zeta)?;
    if deviation > tol {
        return Err(Error::NotSpecialOrthogonal { deviation });
    }
    let (p, _) = proper_similitude_factor(zeta)?;
    let q = &p.inverse()? * &zeta.image_of_one();
    let rebuilt = &LinMap::left(&p) * &LinMap::right(&q);
    if rebuilt.distance(zeta) >= tol {
        return Err(Error::NotInner("L_p R_q does not reproduce the rotation".into()));
    }
    Ok((p, q))
}

/// Scalars `ρ` for which `ρ y` can be a conjugate of `x`: conjugation keeps
/// trace and norm.
fn conjugacy_ratios<S: Scalar>(x: &Element<S>, y: &Element<S>) -> Vec<S> {
    let tol = match S::BACKEND {
        Backend::Exact => 0.0,
        Backend::Approx => x.algebra().tolerance().residual * x.coord_norm_sq().max(y.coord_norm_sq()).sqrt().max(1.0),
    };
    let (tx, ty) = (x.trace(), y.trace());
    match (tx.is_zero_within(tol), ty.is_zero_within(tol)) {
        (false, false) => tx.checked_div(&ty).into_iter().collect(),
        (true, true) => match x.norm().checked_div(&y.norm()).ok().and_then(|r| r.sqrt()) {
            Some(r) => vec![r.clone(), -r],
            None => Vec::new(),
        },
        _ => Vec::new(),
    }
}

/// `s` with `s a s⁻¹ ∈ k* a'` and `s b s⁻¹ ∈ k* b'`, normalised
/// projectively.
pub fn pair_conjugacy<S: Scalar>(
    (a, b): (&Element<S>, &Element<S>),
    (a2, b2): (&Element<S>, &Element<S>),
) -> Result<Element<S>> {
    require_quaternion(&a.left_matrix())?;
    for x in [a, b, a2, b2] {
        if !x.algebra().same_as(a.algebra()) {
            return Err(Error::AlgebraMismatch);
        }
        if !x.is_invertible() {
            return Err(Error::NotInvertible { norm: x.norm().to_f64() });
        }
    }
    let alg = a.algebra();
    for rho_a in conjugacy_ratios(a, a2) {
        for rho_b in conjugacy_ratios(b, b2) {
            let system = intertwiner(a, &rho_a, a2).vstack(&intertwiner(b, &rho_b, b2));
            let null: Vec<Element<S>> = system
                .nullspace(alg.tolerance().residual)
                .into_iter()
                .map(|v| alg.element(v))
                .collect::<Result<_>>()?;
            let Some(s) = invertible_in_span(&null) else { continue };
            let s = s.projective_normal()?;
            let c = LinMap::inner(&s)?;
            let ok_a = c.apply(a).approx_eq(&a2.scale(&rho_a)) || coords_close(&c.apply(a), &a2.scale(&rho_a));
            let ok_b = c.apply(b).approx_eq(&b2.scale(&rho_b)) || coords_close(&c.apply(b), &b2.scale(&rho_b));
            if ok_a && ok_b {
                return Ok(s);
            }
        }
    }
    Err(Error::NotConjugate)
}

fn coords_close<S: Scalar>(x: &Element<S>, y: &Element<S>) -> bool {
    crate::hurwitz::coords_approx_eq(x.coords(), y.coords(), x.algebra().tolerance().residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::{Algebra, HurwitzAlgebra};
    use crate::linear::random::{random_orthonormalised, random_unit, seeded_rng};
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn quaternions() -> Algebra<Rational> {
        HurwitzAlgebra::new(vec![q(-1), q(-1)]).unwrap()
    }

    #[test]
    fn inner_conjugation_examples() {
        let h = quaternions();
        assert_eq!(inner_conj_solve(&LinMap::identity(&h)).unwrap(), h.one());
        let psi = LinMap::new(&h, Matrix::diagonal(&[q(1), q(1), q(-1), q(-1)])).unwrap();
        assert_eq!(inner_conj_solve(&psi).unwrap(), h.basis(1));
        assert!(matches!(inner_conj_solve(&LinMap::conjugation(&h)), Err(Error::NotInner(_))));
        let o = HurwitzAlgebra::new(vec![q(-1); 3]).unwrap();
        assert_eq!(inner_conj_solve(&LinMap::identity(&o)).unwrap_err(), Error::WrongDimension { expected: 4, got: 8 });
    }

    #[test]
    fn inner_conjugation_recovers_random_elements() {
        let mut rng = seeded_rng(1);
        for params in [vec![-1, -1], vec![1, -1], vec![2, 3]] {
            let alg = HurwitzAlgebra::new(params.into_iter().map(q).collect()).unwrap();
            for _ in 0..20 {
                let p = alg.random_invertible(&mut rng);
                let found = inner_conj_solve(&LinMap::inner(&p).unwrap()).unwrap();
                assert_eq!(found, p.projective_normal().unwrap());
            }
        }
    }

    #[test]
    fn so4_examples() {
        let h = quaternions().to_approx();
        let (p, r) = so4_factor(&LinMap::identity(&h)).unwrap();
        assert!(p.approx_eq(&h.one()) && r.approx_eq(&h.one()));
        let c = LinMap::new(&h, Matrix::diagonal(&[1.0, 1.0, -1.0, -1.0])).unwrap();
        let (p, r) = so4_factor(&c).unwrap();
        assert!(p.approx_eq(&h.basis(1)));
        assert!(r.approx_eq(&-&h.basis(1)));
        let skew = LinMap::new(&h, Matrix::diagonal(&[2.0, 1.0, 1.0, 1.0])).unwrap();
        assert!(matches!(so4_factor(&skew), Err(Error::NotSpecialOrthogonal { .. })));
    }

    #[test]
    fn so4_construct_recover() {
        let h = HurwitzAlgebra::new(vec![-1.0, -1.0]).unwrap();
        let mut rng = seeded_rng(2);
        for _ in 0..50 {
            let p0 = random_unit(&h, &mut rng);
            let q0 = random_unit(&h, &mut rng);
            let zeta = &LinMap::left(&p0) * &LinMap::right(&q0);
            let (p, r) = so4_factor(&zeta).unwrap();
            let sign = if p.coords()[0] * p0.coords()[0] > 0.0 { 1.0 } else { -1.0 };
            assert!(p.approx_eq(&p0.scale(&sign)));
            assert!(r.approx_eq(&q0.scale(&sign)));
            let zeta = random_orthonormalised(&h, &mut rng).unwrap();
            let (p, r) = so4_factor(&zeta).unwrap();
            assert!((&LinMap::left(&p) * &LinMap::right(&r)).distance(&zeta) < 1e-10);
        }
    }

    #[test]
    fn exact_proper_similitudes_factor() {
        let h = quaternions();
        let mut rng = seeded_rng(3);
        for _ in 0..20 {
            let a = h.random_invertible(&mut rng);
            let b = h.random_invertible(&mut rng);
            let phi = &LinMap::left(&a) * &LinMap::right(&b);
            let (p, r) = proper_similitude_factor(&phi).unwrap();
            assert_eq!(&LinMap::left(&p) * &LinMap::right(&r), phi);
        }
        assert!(proper_similitude_factor(&LinMap::conjugation(&h)).is_err());
    }

    #[test]
    fn pair_conjugacy_examples() {
        let h = quaternions();
        let (e1, e2, e3) = (h.basis(1), h.basis(2), h.basis(3));
        assert_eq!(pair_conjugacy((&e1, &e2), (&e1, &e2)).unwrap(), h.one());
        let s = pair_conjugacy((&e1, &e2), (&e2, &e3)).unwrap();
        let c = LinMap::inner(&s).unwrap();
        assert_eq!(c.apply(&e1), e2);
        assert_eq!(c.apply(&e2), e3);
        assert_eq!(c.apply(&e3), e1);
        assert_eq!(s, h.element(vec![q(1), q(1), q(1), q(1)]).unwrap());
        assert_eq!(pair_conjugacy((&e1, &e2), (&e1, &e1)).unwrap_err(), Error::NotConjugate);
    }

    #[test]
    fn pair_conjugacy_construct_recover() {
        let h = quaternions();
        let mut rng = seeded_rng(4);
        for _ in 0..30 {
            let a = h.random_invertible(&mut rng);
            let b = h.random_invertible(&mut rng);
            let s0 = h.random_invertible(&mut rng);
            let c = LinMap::inner(&s0).unwrap();
            let (a2, b2) = (c.apply(&a).scale(&q(-2)), c.apply(&b));
            let s = pair_conjugacy((&a, &b), (&a2, &b2)).unwrap();
            let cs = LinMap::inner(&s).unwrap();
            assert!(cs.apply(&a).scale(&q(-2)) == a2 && cs.apply(&b) == b2);
        }
    }
}
