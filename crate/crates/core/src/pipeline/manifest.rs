//! Corpus manifests: one entry per (sample, sensor) capture.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::SCHEMA_VERSION;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub sample_id: String,
    pub label: String,
    pub signer: String,
    pub sensor: String,
    /// Relative to the manifest's directory.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Failure {
    pub sample_id: String,
    pub sensor: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema_version: u32,
    pub config_hash: String,
    pub seed: u64,
    pub classes: Vec<String>,
    /// Processing switches applied on top of the config, e.g. `no_hpf`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variant: Vec<String>,
    #[serde(default)]
    pub entries: Vec<ManifestEntry>,
    #[serde(default)]
    pub failures: Vec<Failure>,
}

impl Manifest {
    pub fn new(config_hash: String, seed: u64, classes: Vec<String>) -> Self {
        Self { schema_version: SCHEMA_VERSION, config_hash, seed, classes, variant: Vec::new(), entries: Vec::new(), failures: Vec::new() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let m: Self = toml::from_str(text).map_err(|e| Error::Parse(format!("manifest: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read manifest {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("manifest: schema_version {} unsupported", self.schema_version)));
        }
        let plain = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        let mut seen = HashSet::new();
        for (i, e) in self.entries.iter().enumerate() {
            for (field, v) in [("sample_id", &e.sample_id), ("signer", &e.signer), ("sensor", &e.sensor)] {
                if !plain(v) {
                    return Err(Error::Parse(format!("manifest: entries[{i}].{field}: '{v}' must be [A-Za-z0-9_-]+")));
                }
            }
            if !self.classes.contains(&e.label) {
                return Err(Error::Parse(format!("manifest: entries[{i}].label: unknown class '{}'", e.label)));
            }
            if !seen.insert((e.sensor.as_str(), e.sample_id.as_str())) {
                return Err(Error::Parse(format!(
                    "manifest: entries[{i}]: sample id '{}' repeated for sensor '{}'",
                    e.sample_id, e.sensor
                )));
            }
        }
        Ok(())
    }

    /// Checks the manifest was produced under the given config.
    pub fn check_hash(&self, config_hash: &str) -> Result<()> {
        if self.config_hash != config_hash {
            return Err(Error::Parse(format!(
                "manifest config hash {} does not match run config {config_hash}",
                self.config_hash
            )));
        }
        Ok(())
    }

    pub fn resolve(&self, base: &Path, entry: &ManifestEntry) -> PathBuf {
        base.join(&entry.path)
    }

    /// Entries whose file does not exist under `base`.
    pub fn missing_paths(&self, base: &Path) -> Vec<&ManifestEntry> {
        self.entries.iter().filter(|e| !self.resolve(base, e).is_file()).collect()
    }

    pub fn sensors(&self) -> Vec<String> {
        let mut s: Vec<String> = self.entries.iter().map(|e| e.sensor.clone()).collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }
}
