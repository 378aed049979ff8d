//! The JSON document every command prints.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use liecert::chevalley::{CONVENTION_ID, TOOLKIT_VERSION};

/// Exit-code contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Violated,
    InvalidInput,
    Inconclusive,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Verified => 0,
            Status::Violated => 1,
            Status::InvalidInput => 2,
            Status::Inconclusive => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub toolkit_version: String,
    pub command: String,
    pub inputs: Value,
    pub verdicts: BTreeMap<String, Value>,
    pub status: Status,
    pub seed: u64,
    pub convention_id: String,
    /// Wall-clock seconds per phase; only present when requested, so that
    /// certificates are otherwise byte-identical across runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Certificate {
    pub fn new(command: &str, inputs: Value, seed: u64) -> Self {
        Certificate {
            toolkit_version: TOOLKIT_VERSION.to_string(),
            command: command.to_string(),
            inputs,
            verdicts: BTreeMap::new(),
            status: Status::Verified,
            seed,
            convention_id: CONVENTION_ID.to_string(),
            timings: None,
        }
    }

    pub fn verdict<T: Serialize>(&mut self, name: &str, value: &T) {
        let v = serde_json::to_value(value).expect("verdicts serialize");
        self.verdicts.insert(name.to_string(), v);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_bit_exactly() {
        let mut c = Certificate::new("roots", serde_json::json!({"family": "B", "rank": 2}), 7);
        c.verdict("count", &8);
        c.verdict("ratio", &liecert::exact::ratio(-1, 3));
        let s = c.to_json();
        let back: Certificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), s);
        assert!(!s.contains("timings"));
    }

    #[test]
    fn exit_codes() {
        let codes: Vec<i32> = [Status::Verified, Status::Violated, Status::InvalidInput, Status::Inconclusive]
            .iter()
            .map(|s| s.code())
            .collect();
        assert_eq!(codes, vec![0, 1, 2, 3]);
    }
}
