use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::experiments::Assertion;

#[derive(Debug, Serialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    /// Git-style blob hash of the canonical config JSON.
    pub input_hash: String,
    pub files: Vec<ManifestEntry>,
    pub wall_clock_seconds: f64,
    pub assertions: Vec<Assertion>,
    pub metrics: serde_json::Map<String, serde_json::Value>,
    pub passed: bool,
}

/// `sha256("blob <len>\0" + bytes)`, the git object framing over SHA-256.
pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex::encode(h.finalize())
}

pub fn input_hash(config: &ExperimentConfig) -> String {
    // serde_json maps are sorted, so the serialization is canonical.
    let v = serde_json::to_value(config).expect("config serializes");
    blob_hash(serde_json::to_string(&v).expect("value serializes").as_bytes())
}

pub fn manifest(dir: &Path, files: &[PathBuf]) -> std::io::Result<Vec<ManifestEntry>> {
    files
        .iter()
        .map(|f| {
            let bytes = std::fs::read(dir.join(f))?;
            Ok(ManifestEntry {
                path: f.clone(),
                bytes: bytes.len() as u64,
                sha256: hex::encode(Sha256::digest(&bytes)),
            })
        })
        .collect()
}
