use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Run metadata written next to every output set. Wall time lives here only,
/// so all other files are byte-identical across reruns.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub instance_sha256: String,
    pub family: Option<String>,
    pub schedule: Option<String>,
    pub p: Option<usize>,
    pub mixer_mode: Option<String>,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
    pub wall_time_seconds: f64,
}

/// Output directory that records every file it writes.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
    started: Instant,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(OutDir {
            root: root.to_path_buf(),
            written: Vec::new(),
            started: Instant::now(),
        })
    }

    /// Temp file in the target directory, then rename.
    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root)
            .with_context(|| format!("temp file in {}", self.root.display()))?;
        tmp.write_all(contents)?;
        tmp.persist(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn finish(mut self, mut manifest: RunManifest) -> Result<()> {
        manifest.outputs = std::mem::take(&mut self.written);
        manifest.wall_time_seconds = self.started.elapsed().as_secs_f64();
        self.write_json("manifest.json", &manifest)?;
        Ok(())
    }
}
