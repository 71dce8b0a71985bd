//! Linear maps of a Hurwitz algebra, similitudes and the polar factorisation.

pub mod eigen;
pub mod matrix;
pub mod polar;
pub mod random;
pub mod similitude;

use std::fmt;
use std::ops::Mul;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::hurwitz::{Algebra, Element};
use crate::scalar::{Backend, Scalar};
use matrix::Matrix;

pub use polar::{polar_decompose, PolarFactors, Reflection};
pub use similitude::{similitude_check, SimilitudeCert};

/// An `l × l` matrix acting on coordinates of an algebra's elements.
#[derive(Clone)]
pub struct LinMap<S: Scalar> {
    algebra: Algebra<S>,
    matrix: Matrix<S>,
    det: OnceLock<S>,
}

impl<S: Scalar> fmt::Debug for LinMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> =
            self.matrix.to_rows().into_iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
        f.debug_struct("LinMap").field("rows", &rows).finish()
    }
}

impl<S: Scalar> PartialEq for LinMap<S> {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.same_as(&other.algebra) && self.matrix == other.matrix
    }
}

impl<S: Scalar> LinMap<S> {
    pub fn new(algebra: &Algebra<S>, matrix: Matrix<S>) -> Result<Self> {
        let l = algebra.dim();
        if matrix.rows() != l || matrix.cols() != l {
            return Err(Error::DimensionMismatch { expected: l, got: matrix.rows().max(matrix.cols()) });
        }
        Ok(Self::from_matrix(algebra, matrix))
    }

    fn from_matrix(algebra: &Algebra<S>, matrix: Matrix<S>) -> Self {
        LinMap { algebra: Arc::clone(algebra), matrix, det: OnceLock::new() }
    }

    pub fn from_rows(algebra: &Algebra<S>, rows: Vec<Vec<S>>) -> Result<Self> {
        Self::new(algebra, Matrix::from_rows(rows)?)
    }

    /// Column `j` is the image of `e_j`.
    pub fn from_columns(algebra: &Algebra<S>, columns: &[Vec<S>]) -> Self {
        let matrix = Matrix::from_columns(columns).expect("columns of equal length");
        Self::new(algebra, matrix).expect("one column per basis vector")
    }

    pub fn from_fn(algebra: &Algebra<S>, f: impl Fn(&Element<S>) -> Element<S>) -> Self {
        let cols: Vec<Vec<S>> = (0..algebra.dim()).map(|j| f(&algebra.basis(j)).into_coords()).collect();
        Self::from_columns(algebra, &cols)
    }

    pub fn identity(algebra: &Algebra<S>) -> Self {
        Self::from_matrix(algebra, Matrix::identity(algebra.dim()))
    }

    pub fn scalar(algebra: &Algebra<S>, s: S) -> Self {
        Self::from_matrix(algebra, Matrix::identity(algebra.dim()).scale(&s))
    }

    /// The conjugation `κ(x) = x̄`.
    pub fn conjugation(algebra: &Algebra<S>) -> Self {
        let diag: Vec<S> = (0..algebra.dim()).map(|i| if i == 0 { S::one() } else { -S::one() }).collect();
        Self::from_matrix(algebra, Matrix::diagonal(&diag))
    }

    pub fn left(a: &Element<S>) -> Self {
        a.left_matrix()
    }

    pub fn right(a: &Element<S>) -> Self {
        a.right_matrix()
    }

    /// `x ↦ s x s⁻¹`.
    pub fn inner(s: &Element<S>) -> Result<Self> {
        Ok(s.left_matrix().compose(&s.inverse()?.right_matrix()))
    }

    pub fn algebra(&self) -> &Algebra<S> {
        &self.algebra
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.algebra.same_as(&other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    /// `self ∘ other`.
    pub fn try_compose(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.compose(other))
    }

    /// `self ∘ other`; the caller guarantees a shared algebra.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert!(self.algebra.same_as(&other.algebra));
        Self::from_matrix(&self.algebra, self.matrix.mul(&other.matrix))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_matrix(&self.algebra, self.matrix.add(&other.matrix)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_matrix(&self.algebra, self.matrix.sub(&other.matrix)))
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_matrix(&self.algebra, self.matrix.scale(s))
    }

    pub fn transpose(&self) -> Self {
        Self::from_matrix(&self.algebra, self.matrix.transpose())
    }

    pub fn apply(&self, x: &Element<S>) -> Element<S> {
        self.try_apply(x).expect("applying a map to an element of another algebra")
    }

    pub fn try_apply(&self, x: &Element<S>) -> Result<Element<S>> {
        if !self.algebra.same_as(x.algebra()) {
            return Err(Error::AlgebraMismatch);
        }
        self.algebra.element(self.matrix.mul_vec(x.coords()))
    }

    /// Image of the identity `e0`.
    pub fn image_of_one(&self) -> Element<S> {
        self.algebra.element(self.matrix.column(0)).expect("column has length l")
    }

    pub fn determinant(&self) -> S {
        self.det.get_or_init(|| self.matrix.determinant()).clone()
    }

    /// Nonzero determinant: literal for exact scalars, `|det| > τ_eq` otherwise.
    pub fn is_invertible(&self) -> bool {
        let d = self.determinant();
        match S::BACKEND {
            Backend::Exact => !d.is_zero_within(0.0),
            Backend::Approx => d.abs_f64() > self.algebra.tolerance().eq,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_invertible() {
            return Err(Error::Singular);
        }
        let inv = self.matrix.inverse().ok_or(Error::Singular)?;
        Ok(Self::from_matrix(&self.algebra, inv))
    }

    /// Max-norm distance to `other`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Equality at the residual tolerance (literal when exact).
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.algebra.same_as(&other.algebra) && self.matrix.approx_eq(&other.matrix, self.algebra.tolerance().residual)
    }

    /// Scalar `ρ` with `self = ρ · other`, if any.
    pub fn ratio_to(&self, other: &Self) -> Option<S> {
        let (i, j) = largest_entry(&other.matrix)?;
        let rho = self.matrix[(i, j)].checked_div(&other.matrix[(i, j)]).ok()?;
        if rho.is_zero_within(0.0) {
            return None;
        }
        self.approx_eq(&other.scale(&rho)).then_some(rho)
    }

    pub fn to_approx(&self, target: &Algebra<f64>) -> LinMap<f64> {
        LinMap::new(target, self.matrix.to_f64()).expect("same dimension")
    }
}

fn largest_entry<S: Scalar>(m: &Matrix<S>) -> Option<(usize, usize)> {
    let mut best = None;
    let mut best_abs = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m[(i, j)].abs_f64();
            let nonzero = !m[(i, j)].is_zero_within(0.0);
            if nonzero && (best.is_none() || v > best_abs) {
                best = Some((i, j));
                best_abs = v;
            }
        }
    }
    best
}

/// Composition `self ∘ rhs`; panics when the maps belong to different
/// algebras.
impl<S: Scalar> Mul for &LinMap<S> {
    type Output = LinMap<S>;

    fn mul(self, rhs: Self) -> LinMap<S> {
        self.try_compose(rhs).expect("composing maps of different algebras")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::HurwitzAlgebra;
    use crate::scalar::Rational;

    fn quaternions() -> Algebra<Rational> {
        HurwitzAlgebra::new(vec![Rational::from_i64(-1), Rational::from_i64(-1)]).unwrap()
    }

    #[test]
    fn examples() {
        let h = quaternions();
        let id = LinMap::identity(&h);
        assert_eq!(id.inverse().unwrap(), id);
        let two = Rational::from_i64(2);
        let one = Rational::from_i64(1);
        let d = LinMap::new(&h, Matrix::diagonal(&[two.clone(), one.clone(), one.clone(), one])).unwrap();
        assert_eq!(d.determinant(), two);
        let l1 = LinMap::left(&h.basis(1));
        assert_eq!(&l1 * &l1, LinMap::scalar(&h, Rational::from_i64(-1)));
        assert_eq!(&l1 * &l1, LinMap::left(&(&h.basis(1) * &h.basis(1))));
    }

    #[test]
    fn singular_map_is_rejected() {
        let h = quaternions();
        let zero = LinMap::scalar(&h, Rational::from_i64(0));
        assert_eq!(zero.inverse().unwrap_err(), Error::Singular);
    }

    #[test]
    fn cached_determinant_matches_fresh_value() {
        let h = quaternions();
        let a = h.element(vec![1, 2, -1, 3].into_iter().map(Rational::from_i64).collect()).unwrap();
        let m = LinMap::left(&a);
        let first = m.determinant();
        assert_eq!(first, m.matrix().determinant());
        assert_eq!(m.clone().determinant(), first);
    }

    #[test]
    fn ratio_between_proportional_maps() {
        let h = quaternions();
        let a = LinMap::left(&h.basis(2));
        let b = a.scale(&Rational::from_i64(-3));
        assert_eq!(b.ratio_to(&a), Some(Rational::from_i64(-3)));
        assert_eq!(LinMap::identity(&h).ratio_to(&a), None);
    }

    #[test]
    fn mismatched_algebras() {
        let h = quaternions();
        let o = HurwitzAlgebra::new(vec![Rational::from_i64(-1); 3]).unwrap();
        assert_eq!(LinMap::identity(&h).try_compose(&LinMap::identity(&o)).unwrap_err(), Error::AlgebraMismatch);
        let split = HurwitzAlgebra::new(vec![Rational::from_i64(1), Rational::from_i64(-1)]).unwrap();
        assert!(LinMap::identity(&h).try_compose(&LinMap::identity(&split)).is_err());
    }
}
