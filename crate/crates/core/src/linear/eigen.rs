//! Cyclic Jacobi eigensolver for small symmetric matrices.

use crate::error::{Error, Result};
use crate::linear::matrix::Matrix;

#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    /// Sorted in descending order.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: Matrix<f64>,
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps until the largest off-diagonal entry is below
/// `tol * max(1, ‖S‖_max)` or a fixed sweep budget runs out.
pub fn symmetric_eigen(s: &Matrix<f64>, tol: f64) -> Result<SymmetricEigen> {
    assert!(s.is_square(), "eigendecomposition of a non-square matrix");
    let n = s.rows();
    let scale = 1f64.max(s.max_abs());
    let asym = s.max_abs_diff(&s.transpose());
    if asym > tol * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let mut a = s.clone();
    let mut v = Matrix::<f64>::identity(n);
    let threshold = (tol * 1e-4).max(f64::EPSILON) * scale;
    for _sweep in 0..100 {
        let off =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].abs()).fold(0.0, f64::max);
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random orthogonal matrix via Gram-Schmidt on a random matrix.
    fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
        let mut cols: Vec<Vec<f64>> = Vec::new();
        while cols.len() < n {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            for c in &cols {
                let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= d * y;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-3 {
                cols.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        Matrix::from_columns(&cols).unwrap()
    }

    #[test]
    fn diagonal_and_identity() {
        let d = Matrix::diagonal(&[3.0, 2.0, 1.0, 1.0]);
        let e = symmetric_eigen(&d, 1e-8).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0, 1.0]);
        assert!(e.vectors.approx_eq(&Matrix::identity(4), 1e-14));
        let e = symmetric_eigen(&Matrix::identity(4), 1e-8).unwrap();
        assert!(e.values.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn recovers_constructed_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [2, 4, 8] {
            for _ in 0..20 {
                let q = random_orthogonal(&mut rng, n);
                let mut d: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
                let s = q.mul(&Matrix::diagonal(&d)).mul(&q.transpose());
                let e = symmetric_eigen(&s, 1e-8).unwrap();
                d.sort_by(|a, b| b.total_cmp(a));
                for (x, y) in e.values.iter().zip(&d) {
                    assert!((x - y).abs() < 1e-10, "{x} vs {y}");
                }
                let vt_v = e.vectors.transpose().mul(&e.vectors);
                assert!(vt_v.approx_eq(&Matrix::identity(n), 1e-10));
                let sv = s.mul(&e.vectors);
                let vl = e.vectors.mul(&Matrix::diagonal(&e.values));
                assert!(sv.approx_eq(&vl, 1e-10));
            }
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(symmetric_eigen(&m, 1e-8), Err(Error::NotSymmetric { .. })));
    }
}
