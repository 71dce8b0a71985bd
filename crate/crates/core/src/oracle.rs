//! Brute-force property checks over random exact elements.
//!
//! Norms are evaluated from the Pfister diagonal `⊗⟨1, −μ_k⟩` computed
//! here from the parameters, not through the algebra's own norm.

use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hurwitz::{Algebra, Element, HurwitzAlgebra};
use crate::isotope::Isotope;
use crate::linear::random::seeded_rng;
use crate::linear::LinMap;
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    NormMultiplicativity,
    Alternativity,
    Moufang,
    Conjugation,
    IdentityRoundTrip,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::NormMultiplicativity,
        Property::Alternativity,
        Property::Moufang,
        Property::Conjugation,
        Property::IdentityRoundTrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::NormMultiplicativity => "norm-multiplicativity",
            Property::Alternativity => "alternativity",
            Property::Moufang => "moufang",
            Property::Conjugation => "conjugation",
            Property::IdentityRoundTrip => "identity-round-trip",
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown oracle property {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub property: Property,
    pub dim: usize,
    pub params: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    pub violations: usize,
    /// Index of the first failing trial.
    pub first_violation: Option<usize>,
    pub passed: bool,
}

fn pfister_norm(params: &[Rational], x: &[Rational]) -> Rational {
    x.iter()
        .enumerate()
        .map(|(i, c)| {
            let weight =
                params.iter().enumerate().filter(|(k, _)| i >> k & 1 == 1).fold(Rational::one(), |w, (_, mu)| w * -mu);
            weight * c * c
        })
        .fold(<Rational as Scalar>::zero(), |s, t| s + t)
}

fn mul(x: &Element<Rational>, y: &Element<Rational>) -> Element<Rational> {
    x * y
}

fn trial<R: Rng>(property: Property, alg: &Algebra<Rational>, rng: &mut R) -> Result<bool> {
    let params = alg.params();
    let x = alg.random_element(rng);
    let y = alg.random_element(rng);
    Ok(match property {
        Property::NormMultiplicativity => {
            let n = |e: &Element<Rational>| pfister_norm(params, e.coords());
            n(&mul(&x, &y)) == n(&x) * n(&y)
        }
        Property::Alternativity => {
            let xx = mul(&x, &x);
            let yy = mul(&y, &y);
            mul(&xx, &y) == mul(&x, &mul(&x, &y))
                && mul(&y, &xx) == mul(&mul(&y, &x), &x)
                && mul(&yy, &x) == mul(&y, &mul(&y, &x))
        }
        Property::Moufang => {
            let z = alg.random_element(rng);
            mul(&z, &mul(&x, &mul(&z, &y))) == mul(&mul(&mul(&z, &x), &z), &y)
                && mul(&x, &mul(&z, &mul(&y, &z))) == mul(&mul(&mul(&x, &z), &y), &z)
                && mul(&mul(&z, &x), &mul(&y, &z)) == mul(&mul(&z, &mul(&x, &y)), &z)
        }
        Property::Conjugation => {
            let n = pfister_norm(params, x.coords());
            x.conjugate().conjugate() == x
                && mul(&x, &y).conjugate() == mul(&y.conjugate(), &x.conjugate())
                && mul(&x, &x.conjugate()) == alg.scalar(n)
        }
        Property::IdentityRoundTrip => {
            let a = alg.random_invertible(rng);
            let b = alg.random_invertible(rng);
            let iso = Isotope::new(LinMap::right(&a).inverse()?, LinMap::left(&b).inverse()?)?;
            iso.find_identity()? == mul(&b, &a)
        }
    })
}

/// Runs `trials` random checks of `property` on the exact algebra with the
/// given parameters.
pub fn run_oracle(property: Property, params: &[Rational], trials: usize, seed: u64) -> Result<OracleReport> {
    let alg = HurwitzAlgebra::new(params.to_vec())?;
    let mut rng = seeded_rng(seed);
    let mut violations = 0;
    let mut first_violation = None;
    for t in 0..trials {
        if !trial(property, &alg, &mut rng)? {
            violations += 1;
            first_violation.get_or_insert(t);
        }
    }
    Ok(OracleReport {
        property,
        dim: alg.dim(),
        params: params.iter().map(ToString::to_string).collect(),
        trials,
        seed,
        violations,
        first_violation,
        passed: violations == 0,
    })
}

/// Parameters `(−1, …, −1)` for the given dimension.
pub fn standard_params(dim: usize) -> Result<Vec<Rational>> {
    match dim {
        1 | 2 | 4 | 8 => Ok(vec![Rational::from_i64(-1); dim.trailing_zeros() as usize]),
        _ => Err(Error::Parse(format!("no Hurwitz algebra of dimension {dim}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn property_names_round_trip() {
        for p in Property::ALL {
            assert_eq!(p.name().parse::<Property>().unwrap(), p);
        }
        assert!("associativity".parse::<Property>().is_err());
    }

    #[test]
    fn pfister_diagonal() {
        let params = vec![Rational::from_i64(1), Rational::from_i64(-1)];
        let e1 = [0, 1, 0, 0].map(Rational::from_i64);
        let e3 = [0, 0, 0, 1].map(Rational::from_i64);
        assert_eq!(pfister_norm(&params, &e1), Rational::from_i64(-1));
        assert_eq!(pfister_norm(&params, &e3), Rational::from_i64(-1));
    }

    #[test]
    fn octonion_identities_hold() {
        let params = standard_params(8).unwrap();
        for p in Property::ALL {
            let report = run_oracle(p, &params, 20, 3).unwrap();
            assert!(report.passed, "{p:?}");
        }
    }

    #[test]
    fn sedenion_dimension_is_rejected() {
        assert!(standard_params(16).is_err());
        assert!(standard_params(3).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let params = standard_params(4).unwrap();
        let a = run_oracle(Property::Moufang, &params, 10, 11).unwrap();
        assert_eq!(a, run_oracle(Property::Moufang, &params, 10, 11).unwrap());
    }
}
