use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Record of one subcommand run, written next to its primary output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub parameters: Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub duration_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

pub struct Run {
    subcommand: &'static str,
    started: Instant,
}

impl Run {
    pub fn start(subcommand: &'static str) -> Self {
        Run {
            subcommand,
            started: Instant::now(),
        }
    }

    pub fn finish(
        self,
        seed: Option<u64>,
        parameters: impl Serialize,
        inputs: Vec<PathBuf>,
        outputs: Vec<PathBuf>,
        details: Option<Value>,
    ) -> Result<RunManifest> {
        Ok(RunManifest {
            subcommand: self.subcommand,
            version: VERSION,
            seed,
            parameters: serde_json::to_value(parameters)?,
            inputs,
            outputs,
            duration_secs: self.started.elapsed().as_secs_f64(),
            details,
        })
    }
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

/// `model.inr` -> `model.inr.manifest.json`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    path.with_file_name(name)
}
