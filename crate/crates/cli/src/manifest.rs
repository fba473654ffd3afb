//! Run manifests written next to every output file.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub toolkit_version: &'static str,
    /// Input name to SHA-256 of its bytes (built-in codes hash their alist text).
    pub input_hashes: BTreeMap<String, String>,
    pub wall_time_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn manifest_path(out: &str) -> String {
    format!("{out}.manifest.json")
}
