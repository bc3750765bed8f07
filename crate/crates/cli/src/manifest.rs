//! Run manifest: config echo, per-stage timings and a content hash for
//! every artifact in the output directory. The manifest itself (and the
//! lock file) are excluded from the hash listing.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::PipelineConfig;
use crate::error::{io_error, Result};
use crate::formats::{read_json, write_json};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Serialize, Deserialize, Default)]
pub struct RunManifest {
    pub version: String,
    pub config_hash: String,
    pub config: Option<PipelineConfig>,
    /// Stage name -> run metadata, in completion order.
    pub stages: BTreeMap<String, StageRecord>,
    /// Relative path -> SHA-256 of every artifact currently present.
    pub files: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct StageRecord {
    pub wall_clock_secs: f64,
    pub outputs: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub fn config_hash(config: &PipelineConfig) -> String {
    sha256_hex(
        serde_json::to_string(config)
            .expect("config serializes")
            .as_bytes(),
    )
}

fn walk_files(dir: &Path, base: &Path, out: &mut Vec<String>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| io_error("listing output directory", e))? {
        let entry = entry.map_err(|e| io_error("listing output directory", e))?;
        let path = entry.path();
        if path.is_dir() {
            walk_files(&path, base, out)?;
        } else {
            let rel = path
                .strip_prefix(base)
                .expect("walked file under base")
                .to_string_lossy()
                .into_owned();
            if rel != MANIFEST_NAME && rel != ".lock" && !rel.starts_with('.') {
                out.push(rel);
            }
        }
    }
    Ok(())
}

/// Records a completed stage: rehashes every artifact in the directory so
/// the manifest always covers exactly what is on disk.
pub fn record_stage(
    output_dir: &Path,
    config: &PipelineConfig,
    stage: &str,
    outputs: &[String],
    wall_clock_secs: f64,
) -> Result<()> {
    let manifest_path = output_dir.join(MANIFEST_NAME);
    let mut manifest: RunManifest = if manifest_path.exists() {
        read_json(&manifest_path)?
    } else {
        RunManifest::default()
    };
    manifest.version = env!("CARGO_PKG_VERSION").to_string();
    manifest.config_hash = config_hash(config);
    manifest.config = Some(config.clone());
    manifest.stages.insert(
        stage.to_string(),
        StageRecord {
            wall_clock_secs,
            outputs: outputs.to_vec(),
        },
    );

    let mut files = Vec::new();
    walk_files(output_dir, output_dir, &mut files)?;
    files.sort();
    manifest.files.clear();
    for rel in files {
        let bytes =
            fs::read(output_dir.join(&rel)).map_err(|e| io_error("hashing artifact", e))?;
        manifest.files.insert(rel, sha256_hex(&bytes));
    }
    write_json(&manifest_path, &manifest)
}
