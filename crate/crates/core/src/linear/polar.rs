//! The factorisation `α = ζ δ λ` over a Euclidean algebra: `ζ` special
//! orthogonal, `δ` positive definite, `λ ∈ {I, κ}`.
//!
//! Computations run in the orthonormal coordinates `x ↦ diag(√d_i) x`, so
//! "symmetric" and "orthogonal" refer to the norm's inner product. For the
//! standard parameters `(-1, ..., -1)` these are the usual matrix notions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurwitz::Algebra;
use crate::linear::eigen::symmetric_eigen;
use crate::linear::matrix::Matrix;
use crate::linear::LinMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reflection {
    Identity,
    Conjugation,
}

impl Reflection {
    pub fn from_sign(sign: i32) -> Self {
        if sign < 0 {
            Reflection::Conjugation
        } else {
            Reflection::Identity
        }
    }

    /// `1` for `I`, `-1` for `κ`.
    pub fn sign(self) -> i32 {
        match self {
            Reflection::Identity => 1,
            Reflection::Conjugation => -1,
        }
    }

    pub fn map<S: crate::scalar::Scalar>(self, algebra: &Algebra<S>) -> LinMap<S> {
        match self {
            Reflection::Identity => LinMap::identity(algebra),
            Reflection::Conjugation => LinMap::conjugation(algebra),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PolarFactors {
    pub rotation: LinMap<f64>,
    pub positive: LinMap<f64>,
    pub reflection: Reflection,
}

impl PolarFactors {
    pub fn recompose(&self) -> LinMap<f64> {
        let lambda = self.reflection.map(self.rotation.algebra());
        &(&self.rotation * &self.positive) * &lambda
    }
}

/// Scaling to orthonormal coordinates and back.
pub(crate) struct Orthonormal {
    to: Matrix<f64>,
    from: Matrix<f64>,
}

impl Orthonormal {
    pub(crate) fn new(algebra: &Algebra<f64>) -> Result<Self> {
        if !algebra.is_euclidean() {
            return Err(Error::NotEuclidean);
        }
        let roots: Vec<f64> = algebra.norm_diagonal().iter().map(|d| d.sqrt()).collect();
        let inv: Vec<f64> = roots.iter().map(|r| 1.0 / r).collect();
        Ok(Orthonormal { to: Matrix::diagonal(&roots), from: Matrix::diagonal(&inv) })
    }

    pub(crate) fn push(&self, m: &Matrix<f64>) -> Matrix<f64> {
        self.to.mul(m).mul(&self.from)
    }

    pub(crate) fn pull(&self, m: &Matrix<f64>) -> Matrix<f64> {
        self.from.mul(m).mul(&self.to)
    }
}

/// `f(S)` for a symmetric matrix through its eigendecomposition.
pub(crate) fn spectral_map(s: &Matrix<f64>, tol: f64, f: impl Fn(f64) -> f64) -> Result<Matrix<f64>> {
    let eig = symmetric_eigen(s, tol)?;
    let v = &eig.vectors;
    let d: Vec<f64> = eig.values.iter().map(|&x| f(x)).collect();
    Ok(v.mul(&Matrix::diagonal(&d)).mul(&v.transpose()))
}

pub fn polar_decompose(alpha: &LinMap<f64>) -> Result<PolarFactors> {
    let alg = alpha.algebra();
    if alg.dim() < 2 {
        return Err(Error::Dim1);
    }
    let basis = Orthonormal::new(alg)?;
    if !alpha.is_invertible() {
        return Err(Error::Singular);
    }
    let reflection = Reflection::from_sign(if alpha.determinant() < 0.0 { -1 } else { 1 });
    let lambda = reflection.map(alg);
    let alpha_prime = basis.push((alpha * &lambda).matrix());
    let gram = alpha_prime.transpose().mul(&alpha_prime);
    let gram = gram.add(&gram.transpose()).scale(&0.5);
    let tol = alg.tolerance().residual;
    let delta = spectral_map(&gram, tol, f64::sqrt)?;
    let delta_inv = spectral_map(&gram, tol, |x| 1.0 / x.sqrt())?;
    let zeta = alpha_prime.mul(&delta_inv);
    Ok(PolarFactors {
        rotation: LinMap::new(alg, basis.pull(&zeta))?,
        positive: LinMap::new(alg, basis.pull(&delta))?,
        reflection,
    })
}

/// Positive definite `δ` rescaled to determinant one, with the scale used.
pub fn unit_determinant(delta: &LinMap<f64>) -> (LinMap<f64>, f64) {
    let det = delta.determinant();
    let scale = det.powf(1.0 / delta.dim() as f64);
    (delta.scale(&(1.0 / scale)), scale)
}

/// Deviation of `ζ` from special orthogonality in the norm's inner product:
/// `max(‖ζ̃ᵀζ̃ - I‖, |det ζ - 1|)`.
pub fn special_orthogonal_deviation(zeta: &LinMap<f64>) -> Result<f64> {
    let basis = Orthonormal::new(zeta.algebra())?;
    let z = basis.push(zeta.matrix());
    let ortho = z.transpose().mul(&z).max_abs_diff(&Matrix::identity(zeta.dim()));
    Ok(ortho.max((zeta.determinant() - 1.0).abs()))
}

/// Asymmetry of `δ` in the norm's inner product.
pub fn self_adjoint_deviation(delta: &LinMap<f64>) -> Result<f64> {
    let basis = Orthonormal::new(delta.algebra())?;
    let d = basis.push(delta.matrix());
    Ok(d.max_abs_diff(&d.transpose()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::HurwitzAlgebra;
    use crate::linear::random::{random_invertible, random_rotation, random_spd};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quaternions() -> Algebra<f64> {
        HurwitzAlgebra::new(vec![-1.0, -1.0]).unwrap()
    }

    #[test]
    fn symmetric_positive_input() {
        let h = quaternions();
        let alpha = LinMap::new(&h, Matrix::diagonal(&[2.0, 0.5, 1.0, 1.0])).unwrap();
        let f = polar_decompose(&alpha).unwrap();
        assert_eq!(f.reflection, Reflection::Identity);
        assert!(f.rotation.distance(&LinMap::identity(&h)) < 1e-14);
        assert!(f.positive.distance(&alpha) < 1e-14);
    }

    #[test]
    fn conjugation_input() {
        let h = quaternions();
        let f = polar_decompose(&LinMap::conjugation(&h)).unwrap();
        assert_eq!(f.reflection, Reflection::Conjugation);
        assert!(f.rotation.distance(&LinMap::identity(&h)) < 1e-14);
        assert!(f.positive.distance(&LinMap::identity(&h)) < 1e-14);
    }

    #[test]
    fn rotated_stretch() {
        let h = quaternions();
        let r = LinMap::from_rows(
            &h,
            vec![
                vec![0.0, -1.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
            ],
        )
        .unwrap();
        let alpha = &r * &LinMap::new(&h, Matrix::diagonal(&[3.0, 1.0, 1.0, 1.0])).unwrap();
        let f = polar_decompose(&alpha).unwrap();
        assert!(f.recompose().distance(&alpha) < 1e-12);
        assert!(f.rotation.distance(&r) < 1e-12);
    }

    #[test]
    fn refuses_split_algebras() {
        let split = HurwitzAlgebra::new(vec![1.0, -1.0]).unwrap();
        assert_eq!(polar_decompose(&LinMap::identity(&split)).unwrap_err(), Error::NotEuclidean);
        let h = quaternions();
        assert_eq!(polar_decompose(&LinMap::scalar(&h, 0.0)).unwrap_err(), Error::Singular);
    }

    #[test]
    fn factors_satisfy_invariants_with_general_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alg = HurwitzAlgebra::new(vec![-2.0, -0.5, -3.0]).unwrap();
        for _ in 0..50 {
            let alpha = random_invertible(&alg, &mut rng);
            let f = polar_decompose(&alpha).unwrap();
            assert!(f.recompose().approx_eq(&alpha));
            assert!(special_orthogonal_deviation(&f.rotation).unwrap() < 1e-10);
            assert!(self_adjoint_deviation(&f.positive).unwrap() < 1e-10);
            assert!(f.positive.determinant() > 0.0);
        }
    }

    #[test]
    fn recovers_known_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = quaternions();
        for sign in [1, -1] {
            let zeta = random_rotation(&h, &mut rng).unwrap();
            let delta = random_spd(&h, &mut rng).unwrap();
            let lambda = Reflection::from_sign(sign);
            let alpha = &(&zeta * &delta) * &lambda.map(&h);
            let f = polar_decompose(&alpha).unwrap();
            assert_eq!(f.reflection, lambda);
            assert!(f.rotation.distance(&zeta) < 1e-9);
            assert!(f.positive.distance(&delta) < 1e-9);
        }
    }

    #[test]
    fn unit_determinant_rescales() {
        let h = quaternions();
        let d = LinMap::new(&h, Matrix::diagonal(&[16.0, 1.0, 1.0, 1.0])).unwrap();
        let (u, s) = unit_determinant(&d);
        assert!((s - 2.0).abs() < 1e-14);
        assert!((u.determinant() - 1.0).abs() < 1e-14);
    }
}
