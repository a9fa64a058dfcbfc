use crate::error::CliResult;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

pub const MANIFEST_SCHEMA: &str = "teleport-run/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Complete,
    Partial,
}

/// Written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    pub version: String,
    pub workers: usize,
    pub wall_time_s: f64,
    pub status: Status,
    /// Column layout of the data file, if any.
    pub data_schema: Option<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            schema: MANIFEST_SCHEMA.into(),
            command: command.into(),
            params: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            seed: None,
            version: env!("CARGO_PKG_VERSION").into(),
            workers: rayon::current_num_threads(),
            wall_time_s: 0.0,
            status: Status::Complete,
            data_schema: None,
            outputs: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn tolerance(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.into(), value);
        self
    }

    /// The part of the manifest that determines the data.
    pub fn fingerprint(&self) -> Value {
        serde_json::json!({
            "command": self.command,
            "params": self.params,
            "tolerances": self.tolerances,
            "seed": self.seed,
            "version": self.version,
            "data_schema": self.data_schema,
        })
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
