//! Run manifests: what a subcommand read, with which parameters, and what it wrote.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub timestamp: String,
    pub toolkit_version: String,
    pub subcommand: String,
    pub parameters: BTreeMap<String, Value>,
    pub inputs: Vec<InputDigest>,
    /// File names relative to the manifest's directory.
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<Value>,
}

/// Honors `SOURCE_DATE_EPOCH` so manifests can be reproduced exactly.
fn timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(chrono::Utc::now);
    now.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn io_error(path: &Path, err: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: err.to_string(),
    }
}

/// Book-keeping for one subcommand invocation. Inputs are digested as they
/// are read and every output goes through [`Run::write`], so the manifest
/// cannot miss an artifact.
pub struct Run {
    subcommand: String,
    out_dir: PathBuf,
    parameters: BTreeMap<String, Value>,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    summary: Option<Value>,
}

impl Run {
    pub fn new(subcommand: &str, out_dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
        Ok(Self {
            subcommand: subcommand.to_string(),
            out_dir: out_dir.to_path_buf(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            summary: None,
        })
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn summary(&mut self, value: Value) {
        self.summary = Some(value);
    }

    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).map_err(|_| CliError::Input {
            path: path.display().to_string(),
            message: "not valid UTF-8".into(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        fs::write(&path, bytes).map_err(|e| io_error(&path, e))?;
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Validation(e.to_string()))?;
        text.push('\n');
        self.write(name, text)
    }

    /// Writes `<manifest_name>` next to the outputs and returns its path.
    pub fn finish(self, manifest_name: &str) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            timestamp: timestamp(),
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: self.subcommand,
            parameters: self.parameters,
            inputs: self.inputs,
            outputs: self.outputs,
            summary: self.summary,
        };
        let path = self.out_dir.join(manifest_name);
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Validation(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| io_error(&path, e))?;
        Ok(path)
    }
}
