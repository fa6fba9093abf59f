use serde::Serialize;
use serde_json::Value;

use crate::Verb;

pub const SCHEMA: &str = "padic-tiles/1";

/// Outcome class; each maps to one process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// The answer is a proven "no" (not a tile, not uniform, ...).
    Negative,
    InputError,
    /// Budget ran out or a claim could not be re-derived.
    Unverified,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Negative => 1,
            Status::InputError => 2,
            Status::Unverified => 3,
        }
    }
}

/// One re-derived claim.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub passed: bool,
    pub detail: Value,
}

impl Check {
    pub fn new(check: &str, passed: bool, detail: Value) -> Self {
        Check { check: check.to_string(), passed, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Options {
    pub truncation: Option<i64>,
    pub budget: Option<u64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub verb: Verb,
    /// `sha256:<hex>` of the input text as read.
    pub input_digest: Option<String>,
    pub options: Options,
    pub status: Status,
    pub result: Value,
    pub verification: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing_ms: u64,
    #[serde(skip)]
    pub dot: Option<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// The report without `timing_ms`; identical inputs give identical payloads.
    pub fn payload(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(m) = &mut v {
            m.remove("timing_ms");
        }
        serde_json::to_string_pretty(&v).expect("values serialize")
    }
}
