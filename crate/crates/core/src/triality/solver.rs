//! Numerical triality components for octonionic similitudes.
//!
//! The unknown is `c = φ₂(1)`. Given `c`, setting `x = 1` or `y = 1` in
//! `φ(xy) = φ₁(x) φ₂(y)` forces
//!
//! ```text
//! φ₁(x) = φ(x) c⁻¹,   φ₂(y) = (c φ(1)⁻¹) φ(y),
//! ```
//!
//! so the remaining identity on basis pairs is a system of 512 equations in
//! the 8 coordinates of `c`, invariant under rescaling `c`. It is solved by
//! damped Gauss-Newton steps on the unit sphere from random starts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hurwitz::Algebra;
use crate::linear::matrix::Matrix;
use crate::linear::LinMap;
use crate::triality::TrialityTriple;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { restarts: 16, seed: 0, max_iterations: 60 }
    }
}

struct Problem<'a> {
    alg: &'a Algebra<f64>,
    images: Vec<Vec<f64>>,
    targets: Vec<Vec<f64>>,
    inv_phi_one: Vec<f64>,
    scale: f64,
}

impl<'a> Problem<'a> {
    fn new(phi: &'a LinMap<f64>) -> Result<Self> {
        let alg = phi.algebra();
        let l = alg.dim();
        let images: Vec<Vec<f64>> = (0..l).map(|j| phi.matrix().column(j)).collect();
        let mut targets = Vec::with_capacity(l * l);
        for i in 0..l {
            for j in 0..l {
                let (k, c) = alg.basis_product(i, j);
                targets.push(images[k].iter().map(|v| c * v).collect());
            }
        }
        let inv_phi_one = phi.image_of_one().inverse()?.into_coords();
        Ok(Problem { alg, images, targets, inv_phi_one, scale: 1f64.max(phi.matrix().max_abs()) })
    }

    fn components(&self, c: &[f64]) -> Option<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let n = self.alg.norm_coords(c);
        let size: f64 = c.iter().map(|x| x * x).sum();
        if n.abs() <= 1e-12 * size {
            return None;
        }
        let c_inv: Vec<f64> = self.alg.conj_coords(c).into_iter().map(|x| x / n).collect();
        let v = self.alg.mul_coords(c, &self.inv_phi_one);
        let first = self.images.iter().map(|x| self.alg.mul_coords(x, &c_inv)).collect();
        let second = self.images.iter().map(|y| self.alg.mul_coords(&v, y)).collect();
        Some((first, second))
    }

    fn residual(&self, c: &[f64]) -> Option<Vec<f64>> {
        let (first, second) = self.components(c)?;
        let l = self.alg.dim();
        let mut r = Vec::with_capacity(l * l * l);
        for (i, x) in first.iter().enumerate() {
            for (j, y) in second.iter().enumerate() {
                let p = self.alg.mul_coords(x, y);
                r.extend(p.iter().zip(&self.targets[i * l + j]).map(|(a, b)| (a - b) / self.scale));
            }
        }
        Some(r)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn normalise(c: &mut [f64]) {
    let n = sum_sq(c).sqrt();
    c.iter_mut().for_each(|x| *x /= n);
}

/// Levenberg-Marquardt descent from `start`; returns the final point and
/// its max-norm residual.
fn descend(problem: &Problem, start: Vec<f64>, max_iterations: usize) -> (Vec<f64>, f64) {
    let l = start.len();
    let mut c = start;
    normalise(&mut c);
    let Some(mut r) = problem.residual(&c) else {
        return (c, f64::INFINITY);
    };
    let mut cost = sum_sq(&r);
    let mut damping = 1e-3;
    let h = 1e-7;
    for _ in 0..max_iterations {
        if max_abs(&r) < 1e-14 {
            break;
        }
        let mut jac: Vec<Vec<f64>> = Vec::with_capacity(l);
        for k in 0..l {
            let mut plus = c.clone();
            let mut minus = c.clone();
            plus[k] += h;
            minus[k] -= h;
            match (problem.residual(&plus), problem.residual(&minus)) {
                (Some(rp), Some(rm)) => jac.push(rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect()),
                _ => return (c, max_abs(&r)),
            }
        }
        let jtj = Matrix::from_fn(l, l, |a, b| jac[a].iter().zip(&jac[b]).map(|(x, y)| x * y).sum());
        let jtr: Vec<f64> = jac.iter().map(|col| col.iter().zip(&r).map(|(x, y)| x * y).sum()).collect();
        let mut improved = false;
        while damping < 1e12 {
            let mut system = jtj.clone();
            for k in 0..l {
                system[(k, k)] += damping * (1.0 + jtj[(k, k)]);
            }
            let Some(inv) = system.inverse() else {
                damping *= 10.0;
                continue;
            };
            let step = inv.mul_vec(&jtr);
            let mut trial: Vec<f64> = c.iter().zip(&step).map(|(x, s)| x - s).collect();
            normalise(&mut trial);
            if let Some(rt) = problem.residual(&trial) {
                let trial_cost = sum_sq(&rt);
                if trial_cost < cost {
                    c = trial;
                    r = rt;
                    cost = trial_cost;
                    damping = (damping / 5.0).max(1e-12);
                    improved = true;
                    break;
                }
            }
            damping *= 4.0;
        }
        if !improved {
            break;
        }
    }
    let res = max_abs(&r);
    (c, res)
}

/// Triality components of an octonionic similitude, or
/// [`Error::TrialitySolverFailed`] when no restart gets below the residual
/// tolerance.
pub fn solve_triality(phi: &LinMap<f64>, options: &SolverOptions) -> Result<TrialityTriple<f64>> {
    let alg = phi.algebra();
    let problem = Problem::new(phi)?;
    let tol = alg.tolerance().residual;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut best = f64::INFINITY;
    for _ in 0..options.restarts.max(1) {
        let start: Vec<f64> = (0..alg.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let (c, res) = descend(&problem, start, options.max_iterations);
        best = best.min(res);
        if res >= tol {
            continue;
        }
        let Some((first, second)) = problem.components(&c) else { continue };
        let triple =
            TrialityTriple::new(phi.clone(), LinMap::from_columns(alg, &first), LinMap::from_columns(alg, &second));
        if triple.residual < tol {
            return Ok(triple);
        }
        best = best.min(triple.residual);
    }
    Err(Error::TrialitySolverFailed { restarts: options.restarts, best_residual: best })
}
