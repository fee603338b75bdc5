//! Run manifests: one `<name>.manifest.json` beside each emitted data file.

use std::fs;
use std::path::{Path, PathBuf};

use mipd_core::topology::AxisSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisRecord {
    pub name: String,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl AxisRecord {
    pub fn new(name: &str, axis: &AxisSpec) -> Self {
        AxisRecord { name: name.to_string(), start: axis.start, end: axis.end, count: axis.count }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    /// File name relative to the manifest's directory.
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub params: serde_json::Value,
    pub axes: Vec<AxisRecord>,
    pub seed: Option<u64>,
    /// UTC, RFC 3339.
    pub started_at: String,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, params: serde_json::Value, axes: Vec<AxisRecord>, seed: Option<u64>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            params,
            axes,
            seed,
            started_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            outputs: Vec::new(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `grid.csv` → `grid.manifest.json`.
pub fn manifest_path(data: &Path) -> PathBuf {
    let stem = data.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    data.with_file_name(format!("{stem}.manifest.json"))
}

/// Writes `data` to `path` and its manifest beside it.
pub fn write_with_manifest(path: &Path, data: &[u8], mut manifest: RunManifest) -> Result<PathBuf, CliError> {
    fs::write(path, data).map_err(|e| CliError::io(path, e))?;
    let file = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    manifest.outputs = vec![OutputDigest { file, sha256: sha256_hex(data) }];
    let mpath = manifest_path(path);
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    fs::write(&mpath, json).map_err(|e| CliError::io(&mpath, e))?;
    Ok(mpath)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_name() {
        assert_eq!(manifest_path(Path::new("out/grid.csv")), PathBuf::from("out/grid.manifest.json"));
        assert_eq!(manifest_path(Path::new("curve")), PathBuf::from("curve.manifest.json"));
    }

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn timestamp_is_rfc3339_utc() {
        let m = RunManifest::new("scan", serde_json::json!({}), vec![], None);
        let t = chrono::DateTime::parse_from_rfc3339(&m.started_at).unwrap();
        assert_eq!(t.offset().local_minus_utc(), 0);
        assert!(m.started_at.ends_with('Z'));
    }
}
