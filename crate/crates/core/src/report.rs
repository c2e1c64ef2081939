//! Serializable results of search and verification tasks.

use serde::{Deserialize, Serialize};

/// Bumped whenever the report layout changes; cached reports with another
/// version are discarded.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Search-tree statistics; every field only grows during a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub nodes: u64,
    pub zero_pruned: u64,
    pub canon_pruned: u64,
    pub leaves: u64,
}

impl Counters {
    pub fn absorb(&mut self, other: &Counters) {
        self.nodes += other.nodes;
        self.zero_pruned += other.zero_pruned;
        self.canon_pruned += other.canon_pruned;
        self.leaves += other.leaves;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema_version: u32,
    pub task: String,
    pub params: Params,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbits: Option<u64>,
    pub witnesses: Vec<String>,
    pub counterexamples: Vec<String>,
    pub details: serde_json::Value,
    pub counters: Counters,
    pub elapsed_ms: u64,
    pub notes: Vec<String>,
}

impl SearchReport {
    pub fn new(task: &str, params: Params) -> SearchReport {
        SearchReport {
            schema_version: SCHEMA_VERSION,
            task: task.to_string(),
            params,
            verdict: Verdict::Pass,
            value: None,
            orbits: None,
            witnesses: Vec::new(),
            counterexamples: Vec::new(),
            details: serde_json::Value::Null,
            counters: Counters::default(),
            elapsed_ms: 0,
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    /// Same report with timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> SearchReport {
        SearchReport { elapsed_ms: 0, ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
