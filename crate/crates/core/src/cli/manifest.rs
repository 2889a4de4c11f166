use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Record of one run. Replaying it with the same command and resolved
/// config reproduces every listed output byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Command path, e.g. `["verify", "clt"]`.
    pub command: Vec<String>,
    pub config_path: PathBuf,
    /// Config after seed override and path resolution.
    pub config: serde_json::Value,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: String,
    pub wall_clock_seconds: f64,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Collects the files written by a command.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(OutputDir { dir: dir.to_path_buf(), files: vec![] })
    }

    pub fn write(&mut self, name: &str, content: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Numerical(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }
}
