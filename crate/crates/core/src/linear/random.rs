//! Seeded generators of test data: invertible maps, similitudes, rotations
//! and positive definite maps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::hurwitz::{Algebra, Element};
use crate::linear::matrix::Matrix;
use crate::linear::polar::Orthonormal;
use crate::linear::LinMap;
use crate::scalar::{Backend, Scalar};

/// The generator every seeded entry point uses.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer entries in `[-5, 5]` (exact) or standard normals (approx),
/// redrawn until invertible.
pub fn random_invertible<S: Scalar, R: Rng + ?Sized>(algebra: &Algebra<S>, rng: &mut R) -> LinMap<S> {
    let l = algebra.dim();
    loop {
        let m = Matrix::from_fn(l, l, |_, _| match S::BACKEND {
            Backend::Exact => S::random_small_int(rng),
            Backend::Approx => S::random_coord(rng),
        });
        let map = LinMap::new(algebra, m).expect("square of size l");
        if map.is_invertible() {
            return map;
        }
    }
}

/// `L_a R_b` for random invertible `a`, `b`.
pub fn random_proper_similitude<S: Scalar, R: Rng + ?Sized>(algebra: &Algebra<S>, rng: &mut R) -> LinMap<S> {
    let a = algebra.random_invertible(rng);
    let b = algebra.random_invertible(rng);
    &LinMap::left(&a) * &LinMap::right(&b)
}

/// `L_a R_b κ`, improper whenever `l >= 2`.
pub fn random_improper_similitude<S: Scalar, R: Rng + ?Sized>(algebra: &Algebra<S>, rng: &mut R) -> LinMap<S> {
    &random_proper_similitude(algebra, rng) * &LinMap::conjugation(algebra)
}

/// A random element of the group acting on isotopes: proper similitudes,
/// together with `κ` in dimension at most 2.
pub fn random_group_element<S: Scalar, R: Rng + ?Sized>(algebra: &Algebra<S>, rng: &mut R) -> LinMap<S> {
    let phi = random_proper_similitude(algebra, rng);
    if algebra.dim() <= 2 && rng.random_bool(0.5) {
        &phi * &LinMap::conjugation(algebra)
    } else {
        phi
    }
}

/// Random element of norm one (Euclidean algebras).
pub fn random_unit<R: Rng + ?Sized>(algebra: &Algebra<f64>, rng: &mut R) -> Element<f64> {
    loop {
        let x = algebra.random_element(rng);
        let n = x.norm();
        if n > 1e-6 {
            return x.scale(&(1.0 / n.sqrt()));
        }
    }
}

/// `L_p R_q` for random unit `p`, `q`: a special orthogonal map.
pub fn random_rotation<R: Rng + ?Sized>(algebra: &Algebra<f64>, rng: &mut R) -> Result<LinMap<f64>> {
    Orthonormal::new(algebra)?;
    let p = random_unit(algebra, rng);
    let q = random_unit(algebra, rng);
    Ok(&LinMap::left(&p) * &LinMap::right(&q))
}

/// Positive definite map with eigenvalues in `[1/2, 2]` and random
/// eigenvectors.
pub fn random_spd<R: Rng + ?Sized>(algebra: &Algebra<f64>, rng: &mut R) -> Result<LinMap<f64>> {
    let basis = Orthonormal::new(algebra)?;
    let q = basis.push(random_rotation(algebra, rng)?.matrix());
    let d: Vec<f64> = (0..algebra.dim()).map(|_| rng.random_range(0.5..2.0)).collect();
    let s = q.mul(&Matrix::diagonal(&d)).mul(&q.transpose());
    LinMap::new(algebra, basis.pull(&s))
}

/// Random special orthogonal map that is not built from multiplications:
/// Gram-Schmidt on a Gaussian matrix, with the determinant forced to `+1`.
pub fn random_orthonormalised<R: Rng + ?Sized>(algebra: &Algebra<f64>, rng: &mut R) -> Result<LinMap<f64>> {
    let basis = Orthonormal::new(algebra)?;
    let l = algebra.dim();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(l);
    while cols.len() < l {
        let mut v: Vec<f64> = (0..l).map(|_| f64::random_coord(rng)).collect();
        for c in &cols {
            let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(c).for_each(|(x, y)| *x -= d * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    let mut m = Matrix::from_columns(&cols)?;
    if m.determinant() < 0.0 {
        for i in 0..l {
            m[(i, 0)] = -m[(i, 0)];
        }
    }
    LinMap::new(algebra, basis.pull(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::HurwitzAlgebra;
    use crate::linear::polar::special_orthogonal_deviation;
    use crate::linear::similitude_check;
    use crate::scalar::Rational;

    #[test]
    fn proper_similitudes_are_certified() {
        let h = HurwitzAlgebra::new(vec![Rational::from_i64(-1), Rational::from_i64(-1)]).unwrap();
        let mut rng = seeded_rng(11);
        for _ in 0..100 {
            let a = h.random_invertible(&mut rng);
            let b = h.random_invertible(&mut rng);
            let phi = &LinMap::left(&a) * &LinMap::right(&b);
            let cert = similitude_check(&phi).unwrap();
            assert_eq!(cert.multiplier, a.norm() * b.norm());
            assert!(cert.proper);
            assert!(similitude_check(&random_proper_similitude(&h, &mut rng)).unwrap().proper);
            assert!(!similitude_check(&random_improper_similitude(&h, &mut rng)).unwrap().proper);
        }
        let one = h.one();
        assert_eq!(&LinMap::left(&one) * &LinMap::right(&one), LinMap::identity(&h));
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let h = HurwitzAlgebra::new(vec![-1.0, -1.0, -1.0]).unwrap();
        let a = random_invertible(&h, &mut seeded_rng(3));
        let b = random_invertible(&h, &mut seeded_rng(3));
        assert_eq!(a, b);
    }

    #[test]
    fn rotations_and_spd() {
        let mut rng = seeded_rng(12);
        for params in [vec![-1.0, -1.0], vec![-1.0, -1.0, -1.0], vec![-2.0, -5.0]] {
            let alg = HurwitzAlgebra::new(params).unwrap();
            for _ in 0..20 {
                assert!(special_orthogonal_deviation(&random_rotation(&alg, &mut rng).unwrap()).unwrap() < 1e-12);
                assert!(
                    special_orthogonal_deviation(&random_orthonormalised(&alg, &mut rng).unwrap()).unwrap() < 1e-12
                );
                assert!(random_spd(&alg, &mut rng).unwrap().determinant() > 0.0);
            }
        }
    }
}
