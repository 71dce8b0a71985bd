use crate::error::{Error, Result};
use crate::linear::LinMap;
use crate::scalar::{Backend, Scalar};

/// Certificate that `map` is a similitude of the algebra's norm.
#[derive(Clone, Debug)]
pub struct SimilitudeCert<S: Scalar> {
    pub map: LinMap<S>,
    pub multiplier: S,
    /// `det = +μ^{l/2}`; always true in dimension 1.
    pub proper: bool,
    /// Max-norm of `φᵀBφ - μB` (zero for exact certificates).
    pub residual: f64,
}

/// Checks `φᵀ B φ = μ B` and decides properness from the sign of
/// `det φ / μ^{l/2}`.
pub fn similitude_check<S: Scalar>(phi: &LinMap<S>) -> Result<SimilitudeCert<S>> {
    if !phi.is_invertible() {
        return Err(Error::Singular);
    }
    let alg = phi.algebra();
    let b = alg.gram();
    let m = phi.matrix();
    let g = m.transpose().mul(&b).mul(m);
    let mu = g[(0, 0)].checked_div(&b[(0, 0)])?;
    let deviation = g.sub(&b.scale(&mu)).max_abs();
    let ok = match S::BACKEND {
        Backend::Exact => deviation == 0.0 && g == b.scale(&mu),
        Backend::Approx => deviation <= alg.tolerance().residual * 1f64.max(g.max_abs()),
    };
    if !ok || mu.is_zero_within(0.0) {
        return Err(Error::NotSimilitude { deviation });
    }
    let l = alg.dim() as u32;
    let proper = if l == 1 {
        true
    } else {
        let mu_sign = if l / 2 % 2 == 1 { mu.sign() } else { 1 };
        phi.determinant().sign() * mu_sign > 0
    };
    Ok(SimilitudeCert { map: phi.clone(), multiplier: mu, proper, residual: deviation })
}

/// Relative deviation `max|φᵀBφ - μB| / max(1, max|φᵀBφ|)` with `μ` read
/// off the first diagonal entry; zero exactly for exact similitudes.
pub fn similitude_deviation<S: Scalar>(phi: &LinMap<S>) -> f64 {
    let b = phi.algebra().gram();
    let m = phi.matrix();
    let g = m.transpose().mul(&b).mul(m);
    match g[(0, 0)].checked_div(&b[(0, 0)]) {
        Ok(mu) if !mu.is_zero_within(0.0) => g.sub(&b.scale(&mu)).max_abs() / 1f64.max(g.max_abs()),
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::HurwitzAlgebra;
    use crate::linear::matrix::Matrix;
    use crate::scalar::Rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn examples() {
        let h = HurwitzAlgebra::new(vec![q(-1), q(-1)]).unwrap();
        let id = similitude_check(&LinMap::identity(&h)).unwrap();
        assert_eq!((id.multiplier.clone(), id.proper), (q(1), true));
        let kappa = similitude_check(&LinMap::conjugation(&h)).unwrap();
        assert_eq!((kappa.multiplier.clone(), kappa.proper), (q(1), false));
        let a = &h.one() + &h.basis(1);
        let la = LinMap::left(&a);
        assert_eq!(la.matrix().transpose().mul(la.matrix()), Matrix::identity(4).scale(&q(2)));
        let cert = similitude_check(&la).unwrap();
        assert_eq!((cert.multiplier, cert.proper, cert.residual), (q(2), true, 0.0));
    }

    #[test]
    fn non_similitude() {
        let h = HurwitzAlgebra::new(vec![q(-1), q(-1)]).unwrap();
        let d = LinMap::new(&h, Matrix::diagonal(&[q(2), q(1), q(1), q(1)])).unwrap();
        assert!(matches!(similitude_check(&d), Err(Error::NotSimilitude { .. })));
    }

    #[test]
    fn left_and_right_multiplications_have_multiplier_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for params in [vec![-1], vec![-1, -1], vec![-1, -1, -1], vec![2, -3], vec![1, -1, 5], vec![3]] {
            let alg = HurwitzAlgebra::new(params.into_iter().map(q).collect()).unwrap();
            for _ in 0..10 {
                let a = alg.random_invertible(&mut rng);
                for m in [LinMap::left(&a), LinMap::right(&a)] {
                    let cert = similitude_check(&m).unwrap();
                    assert_eq!(cert.multiplier, a.norm());
                    assert!(cert.proper);
                    let half = alg.dim() as u32 / 2;
                    assert_eq!(m.determinant(), Scalar::pow(&a.norm(), half));
                }
            }
        }
    }

    #[test]
    fn split_binary_reflection() {
        let k2 = HurwitzAlgebra::new(vec![q(1)]).unwrap();
        let cert = similitude_check(&LinMap::conjugation(&k2)).unwrap();
        assert!(!cert.proper);
        let e1 = LinMap::left(&k2.basis(1));
        let cert = similitude_check(&e1).unwrap();
        assert_eq!(cert.multiplier, q(-1));
        assert!(cert.proper);
    }

    #[test]
    fn dimension_one_is_always_proper() {
        let k = HurwitzAlgebra::new(vec![]).unwrap();
        let cert = similitude_check(&LinMap::scalar(&k, q(-3))).unwrap();
        assert_eq!((cert.multiplier, cert.proper), (q(9), true));
    }

    #[test]
    fn approximate_backend() {
        let h = HurwitzAlgebra::new(vec![-1.0, -1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = h.random_invertible(&mut rng);
        let b = h.random_invertible(&mut rng);
        let phi = &LinMap::left(&a) * &LinMap::right(&b);
        let cert = similitude_check(&phi).unwrap();
        assert!((cert.multiplier - a.norm() * b.norm()).abs() < 1e-12 * cert.multiplier);
        assert!(cert.proper);
        let skew = &phi * &LinMap::conjugation(&h);
        assert!(!similitude_check(&skew).unwrap().proper);
    }
}
