use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use serde::Serialize;

/// Provenance record written next to every output file as `<file>.manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            seed: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
            duration_seconds: 0.0,
        }
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    /// Stamps the duration and writes one manifest per output file.
    pub fn finish(&mut self, elapsed: Duration) -> Result<()> {
        self.duration_seconds = elapsed.as_secs_f64();
        let text = serde_json::to_string_pretty(self)?;
        for out in &self.outputs {
            let path = Self::path_for(out);
            std::fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}
