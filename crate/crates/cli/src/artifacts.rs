use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub out_dir: String,
    pub artifacts: Vec<Artifact>,
    pub version: String,
    pub timestamp_unix: u64,
}

/// Writes files into the output directory and records their hashes.
pub struct ArtifactWriter {
    dir: PathBuf,
    written: Vec<Artifact>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(Artifact {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = polytrack_core::export::to_json_string(value).map_err(|e| CliError::Numeric(e.to_string()))?;
        self.write(name, text.as_bytes())
    }

    pub fn write_with(
        &mut self,
        name: &str,
        fill: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        fill(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
        self.write(name, &buf)
    }

    /// Writes `manifest.json` listing everything written so far.
    pub fn finish(self, command: &str, config: Option<&Path>) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            command: command.to_string(),
            config_path: config.map(|p| p.display().to_string()),
            out_dir: self.dir.display().to_string(),
            artifacts: self.written,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: timestamp(),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Numeric(e.to_string()))? + "\n";
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// `SOURCE_DATE_EPOCH` when set, so reruns can be made byte-identical.
fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()))
}
