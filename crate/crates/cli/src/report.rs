use std::collections::BTreeMap;

use isotopy::json::{scalars_to_strings, MapSpec};
use isotopy::triality::canonical::NORMALIZATION_RULE;
use isotopy::{Element, LinMap, Scalar, Tolerance};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub tolerances: Tolerance,
    pub normalization: &'static str,
}

/// Output of every subcommand. Serialised through [`serde_json::Value`]
/// so that keys come out sorted.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub operation: String,
    pub inputs: BTreeMap<String, Value>,
    pub verdict: String,
    pub witnesses: BTreeMap<String, Value>,
    pub residuals: BTreeMap<String, Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(operation: &str, verdict: &str, tolerances: Tolerance) -> Self {
        Report {
            operation: operation.into(),
            inputs: BTreeMap::new(),
            verdict: verdict.into(),
            witnesses: BTreeMap::new(),
            residuals: BTreeMap::new(),
            reason: None,
            provenance: Provenance { seed: None, tolerances, normalization: NORMALIZATION_RULE },
        }
    }

    pub fn witness(mut self, name: &str, value: impl Serialize) -> Self {
        self.witnesses.insert(name.into(), to_value(value));
        self
    }

    /// Non-finite residuals serialise as `null`.
    pub fn residual(mut self, name: &str, value: f64) -> Self {
        self.residuals.insert(name.into(), value.is_finite().then_some(value));
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.provenance.seed = Some(seed);
        self
    }

    pub fn reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&to_value(self)).expect("report values serialise")
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report values serialise")
}

pub fn coords<S: Scalar>(x: &Element<S>) -> Vec<String> {
    scalars_to_strings(x.coords())
}

pub fn map<S: Scalar>(m: &LinMap<S>) -> MapSpec {
    MapSpec::of(m, None)
}
