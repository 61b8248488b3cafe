use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn hash_file(path: &Path) -> std::io::Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

#[derive(Debug, Serialize)]
pub struct FileHash {
    pub path: PathBuf,
    pub sha256: String,
}

/// Provenance record written next to every run's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub tool_version: &'static str,
    pub seed: u64,
    pub config_sha256: String,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
}

pub struct Recorder {
    started: Instant,
    started_unix: u64,
}

impl Recorder {
    pub fn start() -> Self {
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Recorder { started: Instant::now(), started_unix }
    }

    pub fn finish(
        self,
        seed: u64,
        config_text: &str,
        inputs: &[&Path],
        outputs: &[PathBuf],
    ) -> std::io::Result<RunManifest> {
        let hash_all = |paths: Vec<&Path>| -> std::io::Result<Vec<FileHash>> {
            paths.into_iter().map(|p| Ok(FileHash { path: p.to_path_buf(), sha256: hash_file(p)? })).collect()
        };
        Ok(RunManifest {
            command: std::env::args().collect(),
            tool_version: env!("CARGO_PKG_VERSION"),
            seed,
            config_sha256: sha256_hex(config_text.as_bytes()),
            inputs: hash_all(inputs.to_vec())?,
            outputs: hash_all(outputs.iter().map(PathBuf::as_path).collect())?,
            started_unix: self.started_unix,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        })
    }
}
