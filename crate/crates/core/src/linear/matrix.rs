//! Dense row-major matrices over a [`Scalar`] backend, and the backend
//! kernels behind determinants, inverses and nullspaces.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn diagonal(values: &[S]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, got: bad.len() });
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<S>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|col| col.len() != r) {
            return Err(Error::DimensionMismatch { expected: r, got: bad.len() });
        }
        Ok(Self::from_fn(r, c, |i, j| columns[j][i].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero_within(0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.clone() * other[(k, j)].clone();
                    let cell = &mut out[(i, j)];
                    *cell = cell.clone() + prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::abs_f64).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// Literal equality for exact scalars; relative max-norm comparison
    /// otherwise.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return false;
        }
        match S::BACKEND {
            crate::scalar::Backend::Exact => self == other,
            crate::scalar::Backend::Approx => {
                let scale = 1f64.max(self.max_abs()).max(other.max_abs());
                self.max_abs_diff(other) <= tol * scale
            }
        }
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn determinant(&self) -> S {
        assert!(self.is_square(), "determinant of a non-square matrix");
        S::matrix_determinant(self)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        S::matrix_inverse(self)
    }

    pub fn nullspace(&self, tol: f64) -> Vec<Vec<S>> {
        S::matrix_nullspace(self, tol)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Scalar::to_f64).collect() }
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Exact kernels over ℚ.
pub(crate) mod exact {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};

    use super::Matrix;
    use crate::scalar::{lcm_of_denominators, Rational};

    /// Clears denominators row by row. Returns the integer matrix and the
    /// per-row multipliers.
    fn integerize(m: &Matrix<Rational>) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        let mut rows = Vec::with_capacity(m.rows());
        let mut scales = Vec::with_capacity(m.rows());
        for i in 0..m.rows() {
            let row = m.row(i);
            let l = lcm_of_denominators(row);
            rows.push(row.iter().map(|v| (v * BigRational::from_integer(l.clone())).to_integer()).collect());
            scales.push(l);
        }
        (rows, scales)
    }

    /// Bareiss fraction-free elimination on the integerised matrix.
    pub fn determinant(m: &Matrix<Rational>) -> Rational {
        let n = m.rows();
        if n == 0 {
            return Rational::one();
        }
        let (mut a, scales) = integerize(m);
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Rational::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let det_int = sign * a[n - 1][n - 1].clone();
        let scale: BigInt = scales.iter().product();
        BigRational::new(det_int, scale)
    }

    /// Fraction-free Gauss-Jordan on `[D·A | D]` where `D` clears the
    /// denominators of each row; the left block ends as `det·I`.
    pub fn inverse(m: &Matrix<Rational>) -> Option<Matrix<Rational>> {
        let n = m.rows();
        let (a, scales) = integerize(m);
        let mut aug: Vec<Vec<BigInt>> = a
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.extend((0..n).map(|j| if i == j { scales[i].clone() } else { BigInt::zero() }));
                row
            })
            .collect();
        let mut prev = BigInt::one();
        for k in 0..n {
            let pivot = (k..n).find(|&r| !aug[r][k].is_zero())?;
            aug.swap(k, pivot);
            for i in 0..n {
                if i == k {
                    continue;
                }
                let factor = aug[i][k].clone();
                for j in 0..2 * n {
                    if j == k {
                        continue;
                    }
                    let v = &aug[k][k] * &aug[i][j] - &factor * &aug[k][j];
                    debug_assert!((&v % &prev).is_zero(), "Bareiss division must be exact");
                    aug[i][j] = v / &prev;
                }
                aug[i][k] = BigInt::zero();
            }
            prev = aug[k][k].clone();
        }
        Some(Matrix::from_fn(n, n, |i, j| BigRational::new(aug[i][n + j].clone(), aug[i][i].clone())))
    }

    /// Reduced row echelon form over ℚ; one basis vector per free column.
    pub fn nullspace(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
        let (rows, cols) = (m.rows(), m.cols());
        let mut a: Vec<Vec<Rational>> = m.to_rows();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            let inv = a[r][c].recip();
            for v in a[r].iter_mut() {
                *v = &*v * &inv;
            }
            for i in 0..rows {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..cols {
                        let sub = &f * &a[r][j];
                        a[i][j] -= sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); cols];
                v[f] = Rational::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a[row][f].clone();
                }
                // Clear denominators for tidier witnesses.
                let l = lcm_of_denominators(&v);
                let l = BigRational::from_integer(l.abs());
                v.into_iter().map(|x| x * l.clone()).collect()
            })
            .collect()
    }
}

/// Floating-point kernels.
pub(crate) mod dense {
    use super::Matrix;

    /// Partial-pivot LU; returns the packed factors, permutation parity and
    /// whether a zero pivot was met.
    fn lu(m: &Matrix<f64>) -> (Vec<Vec<f64>>, Vec<usize>, f64, bool) {
        let n = m.rows();
        let mut a = m.to_rows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut parity = 1.0;
        let mut singular = false;
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs())).unwrap();
            if a[p][k] == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                a.swap(p, k);
                perm.swap(p, k);
                parity = -parity;
            }
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                a[i][k] = f;
                for j in k + 1..n {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
        (a, perm, parity, singular)
    }

    pub fn determinant(m: &Matrix<f64>) -> f64 {
        let (a, _, parity, singular) = lu(m);
        if singular {
            return 0.0;
        }
        (0..m.rows()).fold(parity, |acc, i| acc * a[i][i])
    }

    pub fn inverse(m: &Matrix<f64>) -> Option<Matrix<f64>> {
        let n = m.rows();
        let (a, perm, _, singular) = lu(m);
        if singular {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for col in 0..n {
            // Solve L U x = P e_col.
            let mut y: Vec<f64> = perm.iter().map(|&p| if p == col { 1.0 } else { 0.0 }).collect();
            for i in 0..n {
                for k in 0..i {
                    y[i] -= a[i][k] * y[k];
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    y[i] -= a[i][k] * y[k];
                }
                y[i] /= a[i][i];
            }
            for (i, v) in y.into_iter().enumerate() {
                inv[(i, col)] = v;
            }
        }
        if inv.max_abs().is_finite() {
            Some(inv)
        } else {
            None
        }
    }

    /// One-sided Jacobi SVD: returns singular values and right singular
    /// vectors (as columns of `v`).
    pub fn svd_right(m: &Matrix<f64>) -> (Vec<f64>, Matrix<f64>) {
        let (rows, n) = (m.rows(), m.cols());
        let mut u: Vec<Vec<f64>> = (0..n).map(|j| m.column(j)).collect();
        let mut v = Matrix::<f64>::identity(n);
        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha: f64 = u[p].iter().map(|x| x * x).sum();
                    let beta: f64 = u[q].iter().map(|x| x * x).sum();
                    let gamma: f64 = u[p].iter().zip(&u[q]).map(|(x, y)| x * y).sum();
                    if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let t = if zeta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..rows {
                        let (x, y) = (u[p][i], u[q][i]);
                        u[p][i] = c * x - s * y;
                        u[q][i] = s * x + c * y;
                    }
                    for i in 0..n {
                        let (x, y) = (v[(i, p)], v[(i, q)]);
                        v[(i, p)] = c * x - s * y;
                        v[(i, q)] = s * x + c * y;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let sigma = u.iter().map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
        (sigma, v)
    }

    /// Right singular vectors whose singular value is at most
    /// `tol * max(1, sigma_max)`.
    pub fn nullspace(m: &Matrix<f64>, tol: f64) -> Vec<Vec<f64>> {
        let (sigma, v) = svd_right(m);
        let smax = sigma.iter().cloned().fold(1.0, f64::max);
        let mut idx: Vec<usize> = (0..sigma.len()).filter(|&k| sigma[k] <= tol * smax).collect();
        idx.sort_by(|&a, &b| sigma[a].total_cmp(&sigma[b]));
        idx.into_iter().map(|k| v.column(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    /// Oracle: Leibniz expansion over all permutations.
    fn leibniz<S: Scalar>(m: &Matrix<S>) -> S {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = vec![];
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.rows();
        perms(n).into_iter().fold(S::zero(), |acc, p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let term = (0..n).fold(S::one(), |t, i| t * m[(i, p[i])].clone());
            if inversions % 2 == 0 {
                acc + term
            } else {
                acc - term
            }
        })
    }

    fn random_rational(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Rational> {
        Matrix::from_fn(n, n, |_, _| Rational::random_coord(rng))
    }

    #[test]
    fn determinant_examples() {
        let d = Matrix::diagonal(&[q(2, 1), q(1, 1), q(1, 1), q(1, 1)]);
        assert_eq!(d.determinant(), q(2, 1));
        assert_eq!(Matrix::<f64>::identity(4).determinant(), 1.0);
        let sing = Matrix::from_rows(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]]).unwrap();
        assert_eq!(sing.determinant(), q(0, 1));
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn exact_determinant_matches_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=5 {
            for _ in 0..20 {
                let m = random_rational(&mut rng, n);
                assert_eq!(m.determinant(), leibniz(&m));
            }
        }
    }

    #[test]
    fn exact_inverse_is_two_sided() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=8 {
            for _ in 0..10 {
                let m = random_rational(&mut rng, n);
                match m.inverse() {
                    Some(inv) => {
                        assert_eq!(m.mul(&inv), Matrix::identity(n));
                        assert_eq!(inv.mul(&m), Matrix::identity(n));
                    }
                    None => assert_eq!(m.determinant(), q(0, 1)),
                }
            }
        }
        assert_eq!(Matrix::<Rational>::identity(4).inverse().unwrap(), Matrix::identity(4));
    }

    #[test]
    fn dense_kernels_agree_with_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            let m = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let d = m.determinant();
            assert!((d - leibniz(&m)).abs() < 1e-12);
            let inv = m.inverse().unwrap();
            assert!(m.mul(&inv).approx_eq(&Matrix::identity(n), 1e-10));
        }
    }

    #[test]
    fn nullspaces() {
        let m = Matrix::from_rows(vec![vec![q(1, 1), q(2, 1), q(3, 1)], vec![q(2, 1), q(4, 1), q(6, 1)]]).unwrap();
        let ns = m.nullspace(0.0);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(|x| *x == q(0, 1)));
        }
        let mf = m.to_f64();
        let ns = mf.nullspace(1e-10);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mf.mul_vec(v).iter().all(|x| x.abs() < 1e-12));
        }
        assert!(Matrix::<f64>::identity(3).nullspace(1e-10).is_empty());
    }
}
