use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use xxz_core::estimators::EnsembleConfig;

use crate::config::RunConfig;
use crate::persist::{read_json, write_json, Format};
use crate::error::Result;

/// `git describe` of the build.
pub const CODE_VERSION: &str = env!("XXZ_GIT_DESCRIBE");

pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything needed to reproduce the outputs of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub arguments: Vec<String>,
    pub config: RunConfig,
    /// Resolved estimator configuration of ensemble runs.
    pub ensemble: Option<EnsembleConfig>,
    pub master_seed: u64,
    pub format: Format,
    pub code_version: String,
    pub package_version: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn start(experiment: &str, arguments: Vec<String>, config: RunConfig, master_seed: u64, format: Format) -> Self {
        RunManifest {
            experiment: experiment.to_string(),
            arguments,
            config,
            ensemble: None,
            master_seed,
            format,
            code_version: CODE_VERSION.to_string(),
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix_ms: now_ms(),
            finished_unix_ms: 0,
            outputs: Vec::new(),
        }
    }

    /// Stamps the finish time and writes the manifest into `dir`.
    pub fn finish(mut self, dir: &Path) -> Result<PathBuf> {
        self.finished_unix_ms = now_ms();
        let path = dir.join(MANIFEST_FILE);
        write_json(&self, &path)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}
