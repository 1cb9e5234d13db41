//! The `manifest.json` written next to every command's outputs.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

pub const TOOL: &str = "fractal-dims";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the canonical command, version and config.
    pub config_hash: String,
    /// The validated config with defaults filled in.
    pub config: Value,
    pub input_hashes: BTreeMap<String, String>,
    pub files: Vec<FileEntry>,
    pub timing_seconds: f64,
    pub verdicts: BTreeMap<String, bool>,
    pub summary: Value,
    pub from_cache: bool,
}

impl Manifest {
    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Object keys serialize sorted, so equal configs hash equally whatever
/// order the file listed them in.
pub fn config_hash(command: &str, config: &Value) -> String {
    let key = serde_json::json!({ "tool": TOOL, "version": VERSION, "command": command, "config": config });
    sha256_hex(key.to_string().as_bytes())
}
