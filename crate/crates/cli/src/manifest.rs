//! Per-command run manifests: inputs, hashes, seed, outputs, wall clock.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub artifact_version: String,
    pub seed: Option<u64>,
    pub config_sha256: String,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<String>,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Serialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

pub struct ManifestBuilder {
    command: String,
    seed: Option<u64>,
    config_text: String,
    inputs: Vec<FileHash>,
    outputs: Vec<PathBuf>,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new(command: &str) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            seed: None,
            config_text: String::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn config_text(&mut self, text: &str) -> &mut Self {
        self.config_text = text.to_string();
        self
    }

    pub fn input(&mut self, path: &Path) -> anyhow::Result<&mut Self> {
        let bytes = std::fs::read(path)?;
        self.inputs.push(FileHash {
            path: path.display().to_string(),
            sha256: format!("{:x}", Sha256::digest(&bytes)),
        });
        Ok(self)
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.outputs.push(path.to_path_buf());
        self
    }

    /// Writes `manifest-<command>.json` into the output directory.
    pub fn write(self, out_dir: &Path) -> anyhow::Result<()> {
        let manifest = RunManifest {
            command: self.command.clone(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed,
            config_sha256: format!("{:x}", Sha256::digest(self.config_text.as_bytes())),
            inputs: self.inputs,
            outputs: self.outputs.iter().map(|p| p.display().to_string()).collect(),
            wall_clock_secs: self.started.elapsed().as_secs_f64(),
        };
        let path = out_dir.join(format!("manifest-{}.json", self.command));
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }
}
