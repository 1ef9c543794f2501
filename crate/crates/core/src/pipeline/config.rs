//! Run configuration: every tunable of the pipeline in one TOML file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complexity::{DEFAULT_SEGMENT_LEN, DEFAULT_VELOCITY_BINS};
use crate::dsp::{DEFAULT_HPF_CUTOFF_HZ, DEFAULT_OVERLAP, DEFAULT_SIZE, DEFAULT_WINDOW_LEN};
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, GaParams};
use crate::learn::{Hyperparams, ModelKind, Protocol, DEFAULT_K_FINAL, DEFAULT_PROBE_COMPONENTS};
use crate::sim::RadarConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DspConfig {
    pub apply_hpf: bool,
    pub hpf_cutoff_hz: f64,
    pub window_len: usize,
    pub overlap: f64,
    pub isodata: bool,
    pub image_size: usize,
}

impl Default for DspConfig {
    fn default() -> Self {
        Self {
            apply_hpf: true,
            hpf_cutoff_hz: DEFAULT_HPF_CUTOFF_HZ,
            window_len: DEFAULT_WINDOW_LEN,
            overlap: DEFAULT_OVERLAP,
            isodata: true,
            image_size: DEFAULT_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CubeConfig {
    /// Also synthesize dechirped FMCW captures during simulation.
    pub enabled: bool,
    pub samples_per_sweep: usize,
    pub doppler_window: usize,
}

impl Default for CubeConfig {
    fn default() -> Self {
        Self { enabled: false, samples_per_sweep: 16, doppler_window: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComplexityConfig {
    pub velocity_bins: usize,
    pub welch_segment: usize,
    pub welch_overlap: f64,
}

impl Default for ComplexityConfig {
    fn default() -> Self {
        Self { velocity_bins: DEFAULT_VELOCITY_BINS, welch_segment: DEFAULT_SEGMENT_LEN, welch_overlap: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnConfig {
    pub model: ModelKind,
    pub protocol: Protocol,
    /// Features kept by mRMR (after fusion when several sensors are given).
    pub k_select: usize,
    /// Subset sizes for the accuracy-versus-k sweep.
    pub k_sweep: Vec<usize>,
    pub probe_components: usize,
    pub hyperparams: Hyperparams,
}

impl Default for LearnConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Rfc,
            protocol: Protocol::Holdout75_25,
            k_select: DEFAULT_K_FINAL,
            k_sweep: vec![20, 50, 100, 150, 200, 250],
            probe_components: DEFAULT_PROBE_COMPONENTS,
            hyperparams: Hyperparams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub dsp: DspConfig,
    pub cube: CubeConfig,
    pub complexity: ComplexityConfig,
    pub features: FeatureConfig,
    pub ga: GaParams,
    pub learn: LearnConfig,
    pub sensors: BTreeMap<String, RadarConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sensors = [
            ("xethru_uwb", RadarConfig::xethru_uwb()),
            ("ancortek_24ghz", RadarConfig::ancortek_24ghz()),
            ("ti_77ghz", RadarConfig::ti_77ghz()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            dsp: DspConfig::default(),
            cube: CubeConfig::default(),
            complexity: ComplexityConfig::default(),
            features: FeatureConfig::default(),
            ga: GaParams::default(),
            learn: LearnConfig::default(),
            sensors,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Hex SHA-256 of the canonical TOML serialization.
    pub fn hash(&self) -> String {
        hex_digest(self.to_toml().as_bytes())
    }

    pub fn sensor(&self, id: &str) -> Result<&RadarConfig> {
        self.sensors.get(id).ok_or_else(|| Error::Parse(format!("config: unknown sensor '{id}'")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "config: schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let bad = |field: &str, msg: &str| Err(Error::Parse(format!("config: {field}: {msg}")));
        for (id, s) in &self.sensors {
            if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return bad("sensors", &format!("sensor id '{id}' must be [A-Za-z0-9_-]+"));
            }
            s.validate().map_err(|e| Error::Parse(format!("config: sensors.{id}: {e}")))?;
        }
        let d = &self.dsp;
        if !(d.overlap >= 0.0 && d.overlap < 1.0) {
            return bad("dsp.overlap", "must lie in [0, 1)");
        }
        if d.window_len < 2 || d.image_size < 2 {
            return bad("dsp", "window_len and image_size must be >= 2");
        }
        if !(d.hpf_cutoff_hz > 0.0) {
            return bad("dsp.hpf_cutoff_hz", "must be > 0");
        }
        if self.cube.samples_per_sweep == 0 || self.cube.doppler_window == 0 {
            return bad("cube", "samples_per_sweep and doppler_window must be > 0");
        }
        if self.complexity.velocity_bins < 2 || self.complexity.welch_segment < 2 {
            return bad("complexity", "velocity_bins and welch_segment must be >= 2");
        }
        if self.learn.k_select == 0 || self.learn.k_sweep.contains(&0) {
            return bad("learn", "feature counts must be >= 1");
        }
        if self.features.filters == 0 || self.features.cepstra == 0 {
            return bad("features", "filters and cepstra must be >= 1");
        }
        Ok(())
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_losslessly() {
        let cfg = RunConfig::default();
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn empty_file_means_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_field_names_the_location() {
        let err = RunConfig::from_toml("[dsp]\nwindow = 3\n").unwrap_err().to_string();
        assert!(err.contains("window"), "{err}");
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn any_change_moves_the_hash() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.dsp.apply_hpf = false;
        assert_ne!(a.hash(), b.hash());
    }
}
