//! Hurwitz algebras built by the Cayley-Dickson doubling process.
//!
//! Doubling convention, shared by every module:
//!
//! ```text
//! (a, b)(c, d) = (ac + μ·d̄b, da + b·c̄),   conj(a, b) = (ā, -b),
//! n(a, b) = n(a) - μ·n(b).
//! ```
//!
//! The basis starts with the identity `e0`; each doubling appends the
//! second-slot copies `(0, e_i)` after the first-slot ones. With parameters
//! `(-1, -1)` this reproduces Hamilton's table with `e1 e2 = e3`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linear::matrix::Matrix;
use crate::linear::LinMap;
use crate::scalar::{Backend, Scalar, Tolerance};

/// Shared handle to an algebra; elements and maps keep one.
pub type Algebra<S> = Arc<HurwitzAlgebra<S>>;

#[derive(Debug)]
pub struct HurwitzAlgebra<S> {
    params: Vec<S>,
    dim: usize,
    /// `table[i * dim + j] = (k, c)` means `e_i e_j = c e_k`.
    table: Vec<(usize, S)>,
    norm_diag: Vec<S>,
    tol: Tolerance,
}

impl<S: Scalar> HurwitzAlgebra<S> {
    /// Cayley-Dickson construction from `m <= 3` nonzero parameters.
    pub fn new(params: Vec<S>) -> Result<Algebra<S>> {
        Self::with_tolerance(params, Tolerance::default())
    }

    pub fn with_tolerance(params: Vec<S>, tol: Tolerance) -> Result<Algebra<S>> {
        if params.len() > 3 {
            return Err(Error::ParameterCount(params.len()));
        }
        if let Some(index) = params.iter().position(|p| p.is_zero_within(0.0)) {
            return Err(Error::ZeroParameter { index });
        }
        let mut dim = 1;
        let mut table = vec![(0usize, S::one())];
        let mut conj_sign = vec![1i32];
        let mut norm_diag = vec![S::one()];
        for mu in &params {
            let m = dim;
            let n = 2 * m;
            let mut next = vec![(0usize, S::zero()); n * n];
            for i in 0..m {
                for j in 0..m {
                    let (k, c) = table[i * m + j].clone();
                    let (kt, ct) = table[j * m + i].clone();
                    let sj = S::from_i64(conj_sign[j] as i64);
                    next[i * n + j] = (k, c.clone());
                    next[i * n + m + j] = (m + kt, ct.clone());
                    next[(m + i) * n + j] = (m + k, sj.clone() * c);
                    next[(m + i) * n + m + j] = (kt, mu.clone() * sj * ct);
                }
            }
            conj_sign.extend(std::iter::repeat_n(-1, m));
            let second: Vec<S> = norm_diag.iter().map(|d| -(mu.clone() * d.clone())).collect();
            norm_diag.extend(second);
            table = next;
            dim = n;
        }
        let algebra = HurwitzAlgebra { params, dim, table, norm_diag, tol };
        algebra.check_construction()?;
        Ok(Arc::new(algebra))
    }

    /// Identity and basis-level norm multiplicativity. Full multiplicativity
    /// is a property test, not a construction check.
    fn check_construction(&self) -> Result<()> {
        for j in 0..self.dim {
            let left = &self.table[j];
            let right = &self.table[j * self.dim];
            if left.0 != j || right.0 != j || left.1 != S::one() || right.1 != S::one() {
                return Err(Error::Construction(format!("e0 is not an identity for e{j}")));
            }
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let (k, c) = &self.table[i * self.dim + j];
                let lhs = c.clone() * c.clone() * self.norm_diag[*k].clone();
                let rhs = self.norm_diag[i].clone() * self.norm_diag[j].clone();
                if !lhs.approx_eq(&rhs, self.tol.eq) {
                    return Err(Error::Construction(format!("n(e{i} e{j}) != n(e{i}) n(e{j})")));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &[S] {
        &self.params
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn backend(&self) -> Backend {
        S::BACKEND
    }

    /// Diagonal coefficients of the Pfister norm.
    pub fn norm_diagonal(&self) -> &[S] {
        &self.norm_diag
    }

    /// Gram matrix of the polar bilinear form, `B[i][i] = 2 d_i`.
    pub fn gram(&self) -> Matrix<S> {
        let two = S::from_i64(2);
        Matrix::diagonal(&self.norm_diag.iter().map(|d| two.clone() * d.clone()).collect::<Vec<_>>())
    }

    /// `e_i e_j` as `(k, c)` with `e_i e_j = c e_k`.
    pub fn basis_product(&self, i: usize, j: usize) -> (usize, &S) {
        let (k, c) = &self.table[i * self.dim + j];
        (*k, c)
    }

    /// True when every doubling parameter is negative, i.e. the norm is a
    /// positive definite sum of weighted squares.
    pub fn is_euclidean(&self) -> bool {
        self.params.iter().all(|p| p.sign() < 0)
    }

    /// The two-dimensional split algebra `k × k`: dimension 2 with an
    /// isotropic norm `x0² - μ x1²`.
    pub fn is_split_binary(&self) -> bool {
        self.dim == 2 && self.params[0].sqrt().is_some()
    }

    pub fn is_associative(&self) -> bool {
        self.dim <= 4
    }

    pub fn mul_coords(&self, x: &[S], y: &[S]) -> Vec<S> {
        let n = self.dim;
        let mut out = vec![S::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero_within(0.0) {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero_within(0.0) {
                    continue;
                }
                let (k, c) = &self.table[i * n + j];
                out[*k] = out[*k].clone() + c.clone() * xi.clone() * yj.clone();
            }
        }
        out
    }

    pub fn conj_coords(&self, x: &[S]) -> Vec<S> {
        x.iter().enumerate().map(|(i, v)| if i == 0 { v.clone() } else { -v.clone() }).collect()
    }

    pub fn norm_coords(&self, x: &[S]) -> S {
        x.iter().zip(&self.norm_diag).fold(S::zero(), |acc, (v, d)| acc + d.clone() * v.clone() * v.clone())
    }

    pub fn element(self: &Arc<Self>, coords: Vec<S>) -> Result<Element<S>> {
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: coords.len() });
        }
        Ok(Element { algebra: Arc::clone(self), coords })
    }

    pub fn basis(self: &Arc<Self>, i: usize) -> Element<S> {
        let mut coords = vec![S::zero(); self.dim];
        coords[i] = S::one();
        Element { algebra: Arc::clone(self), coords }
    }

    pub fn one(self: &Arc<Self>) -> Element<S> {
        self.basis(0)
    }

    pub fn zero(self: &Arc<Self>) -> Element<S> {
        Element { algebra: Arc::clone(self), coords: vec![S::zero(); self.dim] }
    }

    pub fn scalar(self: &Arc<Self>, s: S) -> Element<S> {
        let mut e = self.zero();
        e.coords[0] = s;
        e
    }

    pub fn random_element<R: Rng + ?Sized>(self: &Arc<Self>, rng: &mut R) -> Element<S> {
        let coords = (0..self.dim).map(|_| S::random_coord(rng)).collect();
        Element { algebra: Arc::clone(self), coords }
    }

    /// Rejection-samples an element with nonzero norm.
    pub fn random_invertible<R: Rng + ?Sized>(self: &Arc<Self>, rng: &mut R) -> Element<S> {
        loop {
            let x = self.random_element(rng);
            if x.is_invertible() {
                return x;
            }
        }
    }

    /// The same algebra over the approximate backend.
    pub fn to_approx(&self) -> Algebra<f64> {
        let params = self.params.iter().map(Scalar::to_f64).collect();
        HurwitzAlgebra::with_tolerance(params, self.tol).expect("converted parameters stay valid")
    }

    pub fn same_as(&self, other: &HurwitzAlgebra<S>) -> bool {
        std::ptr::eq(self, other) || self.params == other.params
    }
}

/// Element of a Hurwitz algebra in the basis `e0, ..., e_{l-1}`.
#[derive(Clone)]
pub struct Element<S: Scalar> {
    algebra: Algebra<S>,
    coords: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Element<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter().map(|c| c.to_string())).finish()
    }
}

impl<S: Scalar> PartialEq for Element<S> {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.same_as(&other.algebra) && self.coords == other.coords
    }
}

impl<S: Scalar> Element<S> {
    pub fn algebra(&self) -> &Algebra<S> {
        &self.algebra
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.algebra.same_as(&other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    fn with_coords(&self, coords: Vec<S>) -> Self {
        Element { algebra: Arc::clone(&self.algebra), coords }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.with_coords(self.algebra.mul_coords(&self.coords, &other.coords)))
    }

    /// `x̄ = <x, e0> e0 - x`.
    pub fn conjugate(&self) -> Self {
        self.with_coords(self.algebra.conj_coords(&self.coords))
    }

    pub fn norm(&self) -> S {
        self.algebra.norm_coords(&self.coords)
    }

    /// `<x, y> = n(x + y) - n(x) - n(y)`.
    pub fn bilinear(&self, other: &Self) -> Result<S> {
        self.check_same(other)?;
        let two = S::from_i64(2);
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .zip(self.algebra.norm_diagonal())
            .fold(S::zero(), |acc, ((x, y), d)| acc + two.clone() * d.clone() * x.clone() * y.clone()))
    }

    /// Trace `<x, e0> = x + x̄` coefficient.
    pub fn trace(&self) -> S {
        S::from_i64(2) * self.coords[0].clone()
    }

    pub fn is_zero(&self) -> bool {
        let tol = self.algebra.tol.eq;
        self.coords.iter().all(|c| c.is_zero_within(tol))
    }

    /// Sum of squared coordinates (not the algebra norm); used to scale
    /// approximate tests.
    pub fn coord_norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c.to_f64() * c.to_f64()).sum()
    }

    /// Nonzero norm: literal for exact scalars, `|n(x)| > τ_eq‖x‖²` otherwise.
    pub fn is_invertible(&self) -> bool {
        let n = self.norm();
        match S::BACKEND {
            Backend::Exact => !n.is_zero_within(0.0),
            Backend::Approx => n.abs_f64() > self.algebra.tol.eq * self.coord_norm_sq(),
        }
    }

    /// `x⁻¹ = n(x)⁻¹ x̄`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible { norm: self.norm().to_f64() });
        }
        let inv_n = self.norm().checked_inv()?;
        Ok(self.conjugate().scale(&inv_n))
    }

    pub fn scale(&self, s: &S) -> Self {
        self.with_coords(self.coords.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Matrix of `x ↦ a x`; column `j` holds `a e_j`.
    pub fn left_matrix(&self) -> LinMap<S> {
        let alg = &self.algebra;
        let cols: Vec<Vec<S>> = (0..alg.dim).map(|j| alg.mul_coords(&self.coords, alg.basis(j).coords())).collect();
        LinMap::from_columns(alg, &cols)
    }

    /// Matrix of `x ↦ x a`.
    pub fn right_matrix(&self) -> LinMap<S> {
        let alg = &self.algebra;
        let cols: Vec<Vec<S>> = (0..alg.dim).map(|j| alg.mul_coords(alg.basis(j).coords(), &self.coords)).collect();
        LinMap::from_columns(alg, &cols)
    }

    /// `(e_i w) e_j = e_i (w e_j)` on every basis pair.
    pub fn in_nucleus(&self) -> bool {
        self.nucleus_defect().is_none()
    }

    /// First basis pair `(i, j)` violating `(e_i w) e_j = e_i (w e_j)`.
    pub fn nucleus_defect(&self) -> Option<(usize, usize)> {
        let alg = &self.algebra;
        let tol = alg.tol.residual * 1f64.max(self.coord_norm_sq().sqrt());
        for i in 0..alg.dim {
            let ei = alg.basis(i);
            let eiw = alg.mul_coords(ei.coords(), &self.coords);
            for j in 0..alg.dim {
                let ej = alg.basis(j);
                let lhs = alg.mul_coords(&eiw, ej.coords());
                let rhs = alg.mul_coords(ei.coords(), &alg.mul_coords(&self.coords, ej.coords()));
                let same = match S::BACKEND {
                    Backend::Exact => lhs == rhs,
                    Backend::Approx => lhs.iter().zip(&rhs).all(|(a, b)| (a.clone() - b.clone()).abs_f64() <= tol),
                };
                if !same {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Coordinate-wise comparison at the algebra's equality tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.algebra.same_as(&other.algebra) && coords_approx_eq(&self.coords, &other.coords, self.algebra.tol.eq)
    }

    /// Index of the first coordinate that is nonzero (beyond `tol` relative
    /// to the largest coordinate for doubles).
    pub fn first_nonzero(&self) -> Option<usize> {
        let scale = self.coords.iter().map(Scalar::abs_f64).fold(0.0, f64::max);
        let tol = match S::BACKEND {
            Backend::Exact => 0.0,
            Backend::Approx => 1e-9 * scale,
        };
        self.coords.iter().position(|c| match S::BACKEND {
            Backend::Exact => !c.is_zero_within(0.0),
            Backend::Approx => c.abs_f64() > tol,
        })
    }

    /// Projective representative: exact elements get first nonzero
    /// coordinate 1; approximate ones get unit norm (when the norm is
    /// positive) and a positive first nonzero coordinate.
    pub fn projective_normal(&self) -> Result<Self> {
        let lead = self.first_nonzero().ok_or(Error::ZeroScalar)?;
        match S::BACKEND {
            Backend::Exact => Ok(self.scale(&self.coords[lead].checked_inv()?)),
            Backend::Approx => {
                let n = self.norm();
                let mut s = match n.sqrt() {
                    Some(r) if !r.is_zero_within(0.0) => r.checked_inv()?,
                    _ => {
                        let c = S::from_i64(1) * self.coords[lead].clone();
                        let mag = if c.sign() < 0 { -c } else { c };
                        mag.checked_inv()?
                    }
                };
                if self.coords[lead].sign() < 0 {
                    s = -s;
                }
                Ok(self.scale(&s))
            }
        }
    }

    pub fn to_approx(&self, target: &Algebra<f64>) -> Element<f64> {
        target.element(self.coords.iter().map(Scalar::to_f64).collect()).expect("same dimension")
    }
}

pub(crate) fn coords_approx_eq<S: Scalar>(x: &[S], y: &[S], tol: f64) -> bool {
    match S::BACKEND {
        Backend::Exact => x == y,
        Backend::Approx => {
            let scale = x.iter().chain(y).map(Scalar::abs_f64).fold(1.0, f64::max);
            x.iter().zip(y).all(|(a, b)| (a.clone() - b.clone()).abs_f64() <= tol * scale)
        }
    }
}

impl<S: Scalar> Add for &Element<S> {
    type Output = Element<S>;

    fn add(self, rhs: Self) -> Element<S> {
        assert!(self.algebra.same_as(&rhs.algebra), "adding elements of different algebras");
        self.with_coords(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a.clone() + b.clone()).collect())
    }
}

impl<S: Scalar> Sub for &Element<S> {
    type Output = Element<S>;

    fn sub(self, rhs: Self) -> Element<S> {
        assert!(self.algebra.same_as(&rhs.algebra), "subtracting elements of different algebras");
        self.with_coords(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a.clone() - b.clone()).collect())
    }
}

impl<S: Scalar> Neg for &Element<S> {
    type Output = Element<S>;

    fn neg(self) -> Element<S> {
        self.with_coords(self.coords.iter().map(|a| -a.clone()).collect())
    }
}

/// Algebra product; panics when the operands live in different algebras
/// (use [`Element::multiply`] for a checked product).
impl<S: Scalar> Mul for &Element<S> {
    type Output = Element<S>;

    fn mul(self, rhs: Self) -> Element<S> {
        self.multiply(rhs).expect("multiplying elements of different algebras")
    }
}
