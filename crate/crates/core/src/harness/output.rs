//! CSV tables, JSON sidecars and the manifest, written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use super::config::SCHEMA_VERSION;
use super::run::RunOutput;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// File name relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub experiment: String,
    pub files: Vec<ManifestEntry>,
}

/// Writes `bytes` to `path` through a temporary file in the same directory, so readers
/// see either the old or the new content.
fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<ManifestEntry> {
    let path = dir.join(name);
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(&path).map_err(|e| Error::io(&path, e.error))?;
    Ok(ManifestEntry {
        path: name.to_string(),
        sha256: format!("{:x}", Sha256::digest(bytes)),
        bytes: bytes.len() as u64,
    })
}

fn pretty(value: &impl Serialize) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("output metadata serializes");
    s.push('\n');
    s.into_bytes()
}

/// Writes `<experiment>.csv`, its `<experiment>.json` metadata sidecar and
/// `manifest.json` into `dir`, creating it if needed. Output bytes depend only on the
/// run, so identical configs and seeds give identical files.
pub fn write_outputs(run: &RunOutput, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = run.experiment.name();
    let csv = run.scan.to_csv()?;
    let sidecar = serde_json::json!({
        "columns": run.scan.columns,
        "rows": run.scan.len(),
        "metadata": run.scan.metadata,
    });
    let files = vec![
        write_atomic(dir, &format!("{stem}.csv"), csv.as_bytes())?,
        write_atomic(dir, &format!("{stem}.json"), &pretty(&sidecar))?,
    ];
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        experiment: stem.to_string(),
        files,
    };
    write_atomic(dir, MANIFEST_FILE, &pretty(&manifest))?;
    Ok(manifest)
}

/// Reads a manifest back and checks every listed file against its hash.
pub fn verify_manifest(dir: &Path) -> Result<Manifest> {
    let path: PathBuf = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Config {
        path: MANIFEST_FILE.into(),
        message: e.to_string(),
    })?;
    for entry in &manifest.files {
        let p = dir.join(&entry.path);
        let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
        let hash = format!("{:x}", Sha256::digest(&bytes));
        if hash != entry.sha256 {
            return Err(Error::NumericalValidity(format!(
                "{} does not match its manifest hash",
                entry.path
            )));
        }
    }
    Ok(manifest)
}
