use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub outputs: BTreeMap<String, Quantity>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, inputs: Value) -> Self {
        Self {
            command: command.into(),
            inputs,
            outputs: BTreeMap::new(),
            status: Status::Ok,
            message: None,
        }
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64, unit: &str) {
        self.outputs.insert(
            name.into(),
            Quantity {
                value,
                unit: unit.to_string(),
            },
        );
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        self.status = Status::Error;
        self.message = Some(message.into());
    }

    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.outputs.get(name).map(|q| q.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }

    /// Human-readable listing of the outputs.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let width = self.outputs.keys().map(String::len).max().unwrap_or(0);
        for (name, q) in &self.outputs {
            let _ = writeln!(out, "{name:<width$}  {:.6e} {}", q.value, q.unit);
        }
        out
    }
}
