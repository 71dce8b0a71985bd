//! Classification of random isotope samples, bucketed by class.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hurwitz::{Algebra, HurwitzAlgebra};
use crate::isotope::Isotope;
use crate::linear::random::{random_invertible, random_proper_similitude, seeded_rng};
use crate::linear::LinMap;
use crate::scalar::{Backend, Rational, Scalar, Tolerance};
use crate::triality::canonical::{comp_canonical, comp_iso_test, quat_iso_test, quaternion_canonical, IsoVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    /// Arbitrary invertible `α`, `β` on Euclidean quaternions.
    Quaternion,
    /// Products of multiplications, each side followed by `κ` with
    /// probability one half.
    Composition,
}

impl FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quaternion" => Ok(Sampler::Quaternion),
            "composition" => Ok(Sampler::Composition),
            other => Err(Error::Parse(format!("unknown sampler {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItemError {
    pub index: usize,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchSummary {
    pub sampler: Sampler,
    pub backend: Backend,
    pub count: usize,
    pub seed: u64,
    /// Item counts keyed by class label.
    pub classes: BTreeMap<String, usize>,
    /// Residuals of re-canonicalising each rebuilt normal form.
    pub residuals: ResidualStats,
    pub inconclusive: Vec<usize>,
    pub errors: Vec<ItemError>,
}

struct Outcome {
    class: String,
    residual: f64,
    conclusive: bool,
}

fn sample_composition<S: Scalar, R: Rng>(alg: &Algebra<S>, rng: &mut R) -> Result<Isotope<S>> {
    let kappa = LinMap::conjugation(alg);
    let side = |rng: &mut R| {
        let phi = random_proper_similitude(alg, rng);
        if rng.random_bool(0.5) {
            &phi * &kappa
        } else {
            phi
        }
    };
    let alpha = side(rng);
    let beta = side(rng);
    Isotope::new(alpha, beta)
}

fn verdict_outcome<S: Scalar>(class: String, verdict: IsoVerdict<S>) -> Result<Outcome> {
    match verdict {
        IsoVerdict::Isomorphic { residual, .. } => Ok(Outcome { class, residual, conclusive: true }),
        IsoVerdict::Inconclusive { residual, .. } => Ok(Outcome { class, residual, conclusive: false }),
        IsoVerdict::NotIsomorphic { reason } => {
            Err(Error::SelfCheck(format!("rebuilt normal form is not equivalent: {reason}")))
        }
    }
}

fn classify_composition<S: Scalar, R: Rng>(alg: &Algebra<S>, rng: &mut R) -> Result<Outcome> {
    let form = comp_canonical(&sample_composition(alg, rng)?)?;
    let again = comp_canonical(&form.rebuild()?)?;
    verdict_outcome(form.class.to_string(), comp_iso_test(&form, &again))
}

fn classify_quaternion<R: Rng>(alg: &Algebra<f64>, rng: &mut R) -> Result<Outcome> {
    let iso = Isotope::new(random_invertible(alg, rng), random_invertible(alg, rng))?;
    let form = quaternion_canonical(&iso)?;
    let again = quaternion_canonical(&form.rebuild()?)?;
    verdict_outcome(form.class.to_string(), quat_iso_test(&form, &again))
}

/// Classifies `count` random isotopes of the quaternions `(−1, −1)`.
/// Item failures are recorded without aborting the batch; the summary is
/// a function of the arguments alone.
pub fn batch_classify(
    count: usize,
    seed: u64,
    sampler: Sampler,
    backend: Backend,
    tol: Tolerance,
) -> Result<BatchSummary> {
    if sampler == Sampler::Quaternion && backend != Backend::Approx {
        return Err(Error::BackendMismatch { expected: Backend::Approx, got: backend });
    }
    let exact = HurwitzAlgebra::with_tolerance(vec![Rational::from_i64(-1); 2], tol)?;
    let approx = HurwitzAlgebra::with_tolerance(vec![-1.0; 2], tol)?;
    let mut rng = seeded_rng(seed);
    let mut summary = BatchSummary {
        sampler,
        backend,
        count,
        seed,
        classes: BTreeMap::new(),
        residuals: ResidualStats::default(),
        inconclusive: Vec::new(),
        errors: Vec::new(),
    };
    let mut total = 0.0;
    let mut classified = 0usize;
    for index in 0..count {
        let mut item_rng = seeded_rng(rng.random());
        let outcome = match (sampler, backend) {
            (Sampler::Quaternion, _) => classify_quaternion(&approx, &mut item_rng),
            (Sampler::Composition, Backend::Exact) => classify_composition(&exact, &mut item_rng),
            (Sampler::Composition, Backend::Approx) => classify_composition(&approx, &mut item_rng),
        };
        match outcome {
            Ok(Outcome { class, residual, conclusive }) => {
                *summary.classes.entry(class).or_default() += 1;
                summary.residuals.max = summary.residuals.max.max(residual);
                total += residual;
                classified += 1;
                if !conclusive {
                    summary.inconclusive.push(index);
                }
            }
            Err(e) => summary.errors.push(ItemError { index, error: e.to_string() }),
        }
    }
    if classified > 0 {
        summary.residuals.mean = total / classified as f64;
    }
    Ok(summary)
}
