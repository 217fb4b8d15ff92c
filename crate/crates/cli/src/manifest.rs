//! Run manifests: the sidecar JSON that makes a CSV reproducible.

use std::path::Path;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

/// Provenance of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// SHA-256 of [`canonical_json`] of `config`.
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    /// UTC, RFC 3339.
    pub timestamp: String,
    /// The command line as invoked.
    pub command: String,
    pub config: RunConfig,
}

/// Deterministic JSON of a configuration: fields in declaration order, no
/// whitespace.
pub fn canonical_json(config: &RunConfig) -> String {
    serde_json::to_string(config).expect("config serializes")
}

pub fn config_hash(config: &RunConfig) -> String {
    hex::encode(Sha256::digest(canonical_json(config).as_bytes()))
}

impl RunManifest {
    pub fn new(config: RunConfig, command: String) -> Self {
        RunManifest {
            config_hash: config_hash(&config),
            seed: config.seed(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            command,
            config,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
    }

    /// Loads a manifest and checks its hash against its configuration.
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        let m: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: not a run manifest: {e}", path.display())))?;
        let expect = config_hash(&m.config);
        if m.config_hash != expect {
            return Err(CliError::Usage(format!(
                "{}: config_hash {} does not match its config ({expect})",
                path.display(),
                m.config_hash
            )));
        }
        Ok(m)
    }
}
