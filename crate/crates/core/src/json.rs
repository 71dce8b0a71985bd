//! JSON interchange formats. Scalars are strings: `"p/q"` (or `"p"`) for
//! exact values and decimal literals for doubles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurwitz::{Algebra, Element, HurwitzAlgebra};
use crate::isotope::Isotope;
use crate::linear::matrix::Matrix;
use crate::linear::LinMap;
use crate::scalar::{Backend, Scalar, Tolerance};
use crate::triality::canonical::{Class, CompCanonicalForm, QuatCanonicalForm, NORMALIZATION_RULE};
use crate::triality::TrialityTriple;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub dim: usize,
    pub params: Vec<String>,
    pub backend: Backend,
}

/// An algebra given inline or by an id resolved through a [`Registry`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Id(String),
    Inline(AlgebraSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementSpec {
    pub algebra: AlgebraRef,
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraRef>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotopeSpec {
    pub algebra: AlgebraRef,
    pub alpha: MapSpec,
    pub beta: MapSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleSpec {
    pub algebra: AlgebraRef,
    pub phi: MapSpec,
    pub phi1: MapSpec,
    pub phi2: MapSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuatFormSpec {
    pub algebra: AlgebraRef,
    pub class: [i32; 2],
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub delta: Vec<Vec<String>>,
    pub epsilon: Vec<Vec<String>>,
    pub normalization: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompFormSpec {
    pub algebra: AlgebraRef,
    pub class: [i32; 2],
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub normalization: String,
}

/// Named algebras. Built-in names are `reals`, `complex`, `hamilton` and
/// `octonions` (all with parameters `-1`), optionally suffixed with
/// `:exact` or `:approx`; further ids can be registered.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Registry {
    #[serde(default)]
    pub algebras: BTreeMap<String, AlgebraSpec>,
}

impl Registry {
    pub fn resolve(&self, r: &AlgebraRef) -> Result<AlgebraSpec> {
        match r {
            AlgebraRef::Inline(spec) => Ok(spec.clone()),
            AlgebraRef::Id(id) => self.algebras.get(id).cloned().map_or_else(|| builtin(id), Ok),
        }
    }
}

fn builtin(id: &str) -> Result<AlgebraSpec> {
    let (name, backend) = match id.split_once(':') {
        Some((name, backend)) => (name, backend.parse()?),
        None => (id, Backend::Exact),
    };
    let m = match name {
        "reals" => 0,
        "complex" => 1,
        "hamilton" => 2,
        "octonions" => 3,
        _ => return Err(Error::Parse(format!("unknown algebra id {id:?}"))),
    };
    Ok(AlgebraSpec { dim: 1 << m, params: vec!["-1".into(); m], backend })
}

pub fn scalars_to_strings<S: Scalar>(values: &[S]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

pub fn parse_scalars<S: Scalar>(values: &[String]) -> Result<Vec<S>> {
    values.iter().map(|v| S::parse_scalar(v)).collect()
}

fn rows_to_strings<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| scalars_to_strings(r)).collect()
}

impl AlgebraSpec {
    pub fn of<S: Scalar>(alg: &Algebra<S>) -> Self {
        AlgebraSpec { dim: alg.dim(), params: scalars_to_strings(alg.params()), backend: S::BACKEND }
    }

    /// Builds the algebra over the backend `S`, which must be the one named
    /// in the spec.
    pub fn build<S: Scalar>(&self, tol: Tolerance) -> Result<Algebra<S>> {
        if self.backend != S::BACKEND {
            return Err(Error::BackendMismatch { expected: S::BACKEND, got: self.backend });
        }
        if self.dim != 1 << self.params.len() {
            return Err(Error::DimensionMismatch { expected: 1 << self.params.len(), got: self.dim });
        }
        HurwitzAlgebra::with_tolerance(parse_scalars(&self.params)?, tol)
    }
}

impl ElementSpec {
    pub fn of<S: Scalar>(x: &Element<S>, algebra: AlgebraRef) -> Self {
        ElementSpec { algebra, coords: scalars_to_strings(x.coords()) }
    }

    pub fn build<S: Scalar>(&self, alg: &Algebra<S>) -> Result<Element<S>> {
        alg.element(parse_scalars(&self.coords)?)
    }
}

impl MapSpec {
    pub fn of<S: Scalar>(m: &LinMap<S>, algebra: Option<AlgebraRef>) -> Self {
        MapSpec { algebra, rows: rows_to_strings(m.matrix()) }
    }

    pub fn build<S: Scalar>(&self, alg: &Algebra<S>) -> Result<LinMap<S>> {
        let rows = self.rows.iter().map(|r| parse_scalars(r)).collect::<Result<Vec<_>>>()?;
        LinMap::from_rows(alg, rows)
    }
}

impl IsotopeSpec {
    pub fn of<S: Scalar>(iso: &Isotope<S>, algebra: AlgebraRef) -> Self {
        IsotopeSpec { algebra, alpha: MapSpec::of(iso.alpha(), None), beta: MapSpec::of(iso.beta(), None) }
    }

    pub fn build<S: Scalar>(&self, alg: &Algebra<S>) -> Result<Isotope<S>> {
        Isotope::new(self.alpha.build(alg)?, self.beta.build(alg)?)
    }
}

impl TripleSpec {
    pub fn of<S: Scalar>(t: &TrialityTriple<S>, algebra: AlgebraRef) -> Self {
        TripleSpec {
            algebra,
            phi: MapSpec::of(&t.phi, None),
            phi1: MapSpec::of(&t.phi1, None),
            phi2: MapSpec::of(&t.phi2, None),
        }
    }

    /// Rebuilds the triple; its residual is recomputed, not trusted.
    pub fn build<S: Scalar>(&self, alg: &Algebra<S>) -> Result<TrialityTriple<S>> {
        Ok(TrialityTriple::new(self.phi.build(alg)?, self.phi1.build(alg)?, self.phi2.build(alg)?))
    }
}

fn check_rule(rule: &str) -> Result<()> {
    if rule == NORMALIZATION_RULE {
        Ok(())
    } else {
        Err(Error::Parse(format!("unsupported normalization rule {rule:?}")))
    }
}

fn parse_class(c: [i32; 2]) -> Result<Class> {
    match c {
        [i, j] if i.abs() == 1 && j.abs() == 1 => Ok(Class(i, j)),
        _ => Err(Error::Parse(format!("invalid class {c:?}"))),
    }
}

impl QuatFormSpec {
    pub fn of(form: &QuatCanonicalForm, algebra: AlgebraRef) -> Self {
        QuatFormSpec {
            algebra,
            class: [form.class.0, form.class.1],
            a: scalars_to_strings(form.a.coords()),
            b: scalars_to_strings(form.b.coords()),
            delta: rows_to_strings(form.delta.matrix()),
            epsilon: rows_to_strings(form.epsilon.matrix()),
            normalization: NORMALIZATION_RULE.into(),
        }
    }

    pub fn build(&self, alg: &Algebra<f64>) -> Result<QuatCanonicalForm> {
        check_rule(&self.normalization)?;
        let map = |rows: &Vec<Vec<String>>| MapSpec { algebra: None, rows: rows.clone() }.build(alg);
        Ok(QuatCanonicalForm {
            class: parse_class(self.class)?,
            a: alg.element(parse_scalars(&self.a)?)?,
            b: alg.element(parse_scalars(&self.b)?)?,
            delta: map(&self.delta)?,
            epsilon: map(&self.epsilon)?,
        })
    }
}

impl CompFormSpec {
    pub fn of<S: Scalar>(form: &CompCanonicalForm<S>, algebra: AlgebraRef) -> Self {
        CompFormSpec {
            algebra,
            class: [form.class.0, form.class.1],
            a: scalars_to_strings(form.a.coords()),
            b: scalars_to_strings(form.b.coords()),
            normalization: NORMALIZATION_RULE.into(),
        }
    }

    pub fn build<S: Scalar>(&self, alg: &Algebra<S>) -> Result<CompCanonicalForm<S>> {
        check_rule(&self.normalization)?;
        Ok(CompCanonicalForm {
            class: parse_class(self.class)?,
            a: alg.element(parse_scalars(&self.a)?)?,
            b: alg.element(parse_scalars(&self.b)?)?,
        })
    }
}
