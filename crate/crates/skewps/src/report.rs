//! Deterministic JSON reports. Field order is fixed by the struct layout
//! and params are kept in a sorted map, so a report is byte-identical
//! across runs with the same scenario and seed.

use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub id: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub check: String,
    /// Stable identifier for what this report verifies; equals the check
    /// id of the scenario catalog.
    pub anchor: String,
    pub ring: String,
    pub precision: usize,
    pub samples: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
    pub assertions: Vec<Assertion>,
    pub pass: bool,
}

impl Report {
    pub fn new(check: &str, ring: &str, precision: usize, samples: usize, seed: u64) -> Self {
        Report {
            check: check.to_string(),
            anchor: check.to_string(),
            ring: ring.to_string(),
            precision,
            samples,
            seed,
            params: BTreeMap::new(),
            assertions: Vec::new(),
            pass: false,
        }
    }

    pub fn set_param(&mut self, key: &str, value: Value) {
        self.params.insert(key.to_string(), value);
    }

    pub fn push(&mut self, id: &str, pass: bool, witness: Option<String>) {
        self.assertions.push(Assertion {
            id: id.to_string(),
            pass,
            witness,
        });
    }

    pub fn finish(mut self) -> Self {
        self.pass = !self.assertions.is_empty() && self.assertions.iter().all(|a| a.pass);
        self
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}
