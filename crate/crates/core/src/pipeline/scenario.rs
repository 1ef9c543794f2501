//! Scenario files: which classes to simulate, how often, and how much each
//! repetition varies.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::derive_seed;
use crate::error::{Error, Result};
use crate::sim::{MotionKind, ScriptParams, MAX_SPEED_MPS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Articulator {
    pub kind: MotionKind,
    #[serde(default)]
    pub params: ScriptParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub name: String,
    /// Signer-type tag copied into the manifest (native, imitation, activity, ...).
    #[serde(default = "default_signer")]
    pub signer: String,
    /// Multiplies every jitter amplitude for this class.
    #[serde(default = "one")]
    pub jitter_scale: f64,
    pub articulators: Vec<Articulator>,
}

fn default_signer() -> String {
    "activity".into()
}

fn one() -> f64 {
    1.0
}

/// Per-repetition perturbation amplitudes. Range, displacement, RCS and
/// onset are drawn symmetrically; aspect and warp only increase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Jitter {
    pub range_m: f64,
    /// Relative.
    pub displacement: f64,
    pub rcs_db: f64,
    pub onset: f64,
    pub aspect_deg: f64,
    pub warp: f64,
}

impl Default for Jitter {
    fn default() -> Self {
        Self { range_m: 0.1, displacement: 0.15, rcs_db: 2.0, onset: 0.05, aspect_deg: 10.0, warp: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Clutter {
    pub range: f64,
    pub rcs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    #[serde(default = "default_duration")]
    pub duration_s: f64,
    #[serde(default = "default_snr")]
    pub snr_db: f64,
    pub sensors: Vec<String>,
    pub samples_per_class: usize,
    /// Stationary reflectors (walls, furniture) present in every capture.
    #[serde(default)]
    pub clutter: Vec<Clutter>,
    #[serde(default)]
    pub jitter: Jitter,
    pub classes: Vec<ClassSpec>,
}

fn default_duration() -> f64 {
    4.0
}

fn default_snr() -> f64 {
    20.0
}

fn valid_id(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let sc: Self = toml::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn class_names(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.name.clone()).collect()
    }

    pub fn sample_id(&self, class: usize, index: usize) -> String {
        format!("{}-{index:04}", self.classes[class].name)
    }

    pub fn n_samples(&self) -> usize {
        self.classes.len() * self.samples_per_class
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: String, msg: &str| Err(Error::Parse(format!("scenario: {field}: {msg}")));
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return bad("duration_s".into(), "must be > 0");
        }
        if self.snr_db.is_nan() {
            return bad("snr_db".into(), "must be a number");
        }
        if self.sensors.is_empty() {
            return bad("sensors".into(), "at least one sensor is required");
        }
        if self.classes.is_empty() {
            return bad("classes".into(), "at least one class is required");
        }
        for (i, c) in self.classes.iter().enumerate() {
            if !valid_id(&c.name) {
                return bad(format!("classes[{i}].name"), "must be [A-Za-z0-9_-]+");
            }
            if self.classes[..i].iter().any(|o| o.name == c.name) {
                return bad(format!("classes[{i}].name"), "duplicate class name");
            }
            if !valid_id(&c.signer) {
                return bad(format!("classes[{i}].signer"), "must be [A-Za-z0-9_-]+");
            }
            if !(c.jitter_scale >= 0.0 && c.jitter_scale.is_finite()) {
                return bad(format!("classes[{i}].jitter_scale"), "must be >= 0");
            }
            if c.articulators.is_empty() {
                return bad(format!("classes[{i}].articulators"), "at least one articulator is required");
            }
            for (j, a) in c.articulators.iter().enumerate() {
                let speed = a.params.peak_speed(a.kind, self.duration_s);
                if speed > MAX_SPEED_MPS {
                    return bad(
                        format!("classes[{i}].articulators[{j}]"),
                        &format!("peak speed {speed:.3} m/s exceeds {MAX_SPEED_MPS} m/s"),
                    );
                }
                crate::sim::script_motion(a.kind, &a.params, 2, 1.0 / self.duration_s)
                    .map_err(|e| Error::Parse(format!("scenario: classes[{i}].articulators[{j}]: {e}")))?;
            }
        }
        for (i, c) in self.clutter.iter().enumerate() {
            if !(c.range > 0.1 && c.rcs >= 0.0) {
                return bad(format!("clutter[{i}]"), "needs range > 0.1 m and rcs >= 0");
            }
        }
        let j = &self.jitter;
        if [j.range_m, j.displacement, j.rcs_db, j.onset, j.aspect_deg, j.warp].iter().any(|v| !(*v >= 0.0)) {
            return bad("jitter".into(), "amplitudes must be >= 0");
        }
        Ok(())
    }

    /// Perturbed articulator scripts for one repetition; identical for every
    /// sensor so that all sensors observe the same motion.
    pub fn realize(&self, class: usize, index: usize) -> Vec<Articulator> {
        let spec = &self.classes[class];
        let s = spec.jitter_scale;
        let j = &self.jitter;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, &[class as u64, index as u64]));
        let mut sym = |amp: f64| amp * s * (2.0 * rng.random::<f64>() - 1.0);
        spec.articulators
            .iter()
            .map(|a| {
                let mut p = a.params.clone();
                p.range = (p.range + sym(j.range_m)).clamp(0.3, 20.0);
                p.displacement = (p.displacement * (1.0 + sym(j.displacement))).clamp(-1.0, 1.0);
                p.rcs *= 10f64.powf(sym(j.rcs_db) / 10.0);
                p.onset = (p.onset + sym(j.onset)).clamp(0.0, (1.0 - p.span).max(0.0));
                p.aspect_deg = (p.aspect_deg + sym(j.aspect_deg).abs()).clamp(0.0, 85.0);
                p.warp = (p.warp + sym(j.warp).abs()).clamp(1.0, 2.0);
                // keep inside the speed and clearance limits after perturbation
                let speed = p.peak_speed(a.kind, self.duration_s);
                if speed > MAX_SPEED_MPS {
                    p.displacement *= MAX_SPEED_MPS / speed * (1.0 - 1e-9);
                }
                let reach = p.displacement.abs() * p.aspect_deg.to_radians().cos();
                if p.range - reach <= 0.1 {
                    p.range = reach + 0.1 + 1e-6;
                }
                Articulator { kind: a.kind, params: p }
            })
            .collect()
    }
}
