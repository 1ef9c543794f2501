//! Scripted articulator kinematics.
//!
//! Each script moves a point scatterer radially inside an activity window
//! `[onset, onset + span]` expressed as fractions of the capture; outside the
//! window the scatterer rests at the window's start or end position.
//!
//! | kind        | trajectory inside the window (u ∈ [0, 1])         | peak speed          |
//! |-------------|----------------------------------------------------|---------------------|
//! | `Static`    | R0                                                 | 0                   |
//! | `Reach`     | R0 − d·u (constant velocity)                       | d / Tw              |
//! | `Raise`     | R0 − d·sin(πu) (one bounce, toward then away)      | π·d / Tw            |
//! | `Oscillate` | R0 − d·(1 − cos 2πku)/2 (k reduplicated cycles)    | π·k·d / Tw          |
//! | `TwoHanded` | oscillate pair in antiphase (one hand per track)   | π·k·d / Tw          |
//!
//! `d` is the displacement projected onto the line of sight,
//! `displacement · cos(aspect)`; the RCS is attenuated by the `occlusion`
//! factor. Tw is the window duration in seconds. A `warp` exponent other
//! than 1 replaces u by u^warp, distorting the velocity profile while keeping
//! the path.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ScattererTrack;
use crate::error::{Error, Result};

/// Upper bound on scripted radial speed, m/s.
pub const MAX_SPEED_MPS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionKind {
    Static,
    Reach,
    Raise,
    Oscillate,
    TwoHanded,
}

impl FromStr for MotionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(Self::Static),
            "reach" => Ok(Self::Reach),
            "raise" => Ok(Self::Raise),
            "oscillate" => Ok(Self::Oscillate),
            "two_handed" => Ok(Self::TwoHanded),
            other => Err(Error::Parse(format!("unknown motion kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScriptParams {
    /// Starting range, m. Bounds: [0.3, 20].
    pub range: f64,
    /// Radial displacement toward the sensor, m. Bounds: |d| <= 1.
    pub displacement: f64,
    /// Cycle count for oscillating scripts. Bounds: 1..=20.
    pub cycles: u32,
    /// m². Bounds: >= 0.
    pub rcs: f64,
    /// Aspect angle between motion and line of sight, degrees. Bounds: [0, 85].
    pub aspect_deg: f64,
    /// RCS attenuation factor. Bounds: [0, 1].
    pub occlusion: f64,
    pub onset: f64,
    pub span: f64,
    /// Progress exponent: u is replaced by u^warp. Bounds: [1, 2].
    pub warp: f64,
}

impl Default for ScriptParams {
    fn default() -> Self {
        Self {
            range: 1.5,
            displacement: 0.3,
            cycles: 1,
            rcs: 0.01,
            aspect_deg: 0.0,
            occlusion: 1.0,
            onset: 0.0,
            span: 1.0,
            warp: 1.0,
        }
    }
}

impl ScriptParams {
    /// Largest radial speed of the script over a capture of `duration_s` seconds.
    pub fn peak_speed(&self, kind: MotionKind, duration_s: f64) -> f64 {
        let d = (self.displacement * self.aspect_deg.to_radians().cos()).abs();
        let window_s = self.span * duration_s;
        let k = self.cycles as f64;
        // d(u^warp)/du is at most warp on [0, 1]
        self.warp
            * match kind {
                MotionKind::Static => 0.0,
                MotionKind::Reach => d / window_s,
                MotionKind::Raise => PI * d / window_s,
                MotionKind::Oscillate | MotionKind::TwoHanded => PI * k * d / window_s,
            }
    }

    fn validate(&self, kind: MotionKind) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        if !(0.3..=20.0).contains(&self.range) {
            return bad(format!("range {} outside [0.3, 20] m", self.range));
        }
        if !(self.displacement.abs() <= 1.0) {
            return bad(format!("displacement {} exceeds 1 m", self.displacement));
        }
        if matches!(kind, MotionKind::Oscillate | MotionKind::TwoHanded) && !(1..=20).contains(&self.cycles) {
            return bad(format!("cycles {} outside 1..=20", self.cycles));
        }
        if !(self.rcs.is_finite() && self.rcs >= 0.0) {
            return bad(format!("rcs {} must be >= 0", self.rcs));
        }
        if !(0.0..=85.0).contains(&self.aspect_deg) {
            return bad(format!("aspect {} outside [0, 85] degrees", self.aspect_deg));
        }
        if !(0.0..=1.0).contains(&self.occlusion) {
            return bad(format!("occlusion {} outside [0, 1]", self.occlusion));
        }
        if !(0.0..1.0).contains(&self.onset) || !(self.span > 0.0 && self.onset + self.span <= 1.0 + 1e-12) {
            return bad(format!("activity window [{}, +{}] outside the capture", self.onset, self.span));
        }
        if !(1.0..=2.0).contains(&self.warp) {
            return bad(format!("warp {} outside [1, 2]", self.warp));
        }
        // the scatterer must stay in front of the sensor
        let d = self.displacement.abs() * self.aspect_deg.to_radians().cos();
        if self.range - d <= 0.1 {
            return bad("trajectory passes within 0.1 m of the sensor".into());
        }
        Ok(())
    }
}

/// Generates the scatterer tracks of one motion script.
pub fn script_motion(
    kind: MotionKind,
    params: &ScriptParams,
    n_samples: usize,
    sample_rate: f64,
) -> Result<Vec<ScattererTrack>> {
    params.validate(kind)?;
    if n_samples < 2 {
        return Err(Error::domain("scripts need at least 2 samples"));
    }
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::domain("sample rate must be > 0"));
    }
    let d = params.displacement * params.aspect_deg.to_radians().cos();
    let k = params.cycles as f64;
    let peak_speed = params.peak_speed(kind, (n_samples - 1) as f64 / sample_rate);
    if peak_speed > MAX_SPEED_MPS {
        return Err(Error::domain(format!(
            "{kind:?} peak speed {peak_speed:.3} m/s exceeds {MAX_SPEED_MPS} m/s"
        )));
    }

    let progress = |n: usize| {
        let t = n as f64 / (n_samples - 1) as f64;
        ((t - params.onset) / params.span).clamp(0.0, 1.0).powf(params.warp)
    };
    let rcs = params.rcs * params.occlusion;
    let r0 = params.range;
    let trace = |f: &dyn Fn(f64) -> f64| (0..n_samples).map(|n| f(progress(n))).collect::<Vec<_>>();

    let tracks = match kind {
        MotionKind::Static => vec![trace(&|_| r0)],
        MotionKind::Reach => vec![trace(&|u| r0 - d * u)],
        MotionKind::Raise => vec![trace(&|u| r0 - d * (PI * u).sin())],
        MotionKind::Oscillate => vec![trace(&|u| r0 - d * (1.0 - (2.0 * PI * k * u).cos()) / 2.0)],
        MotionKind::TwoHanded => vec![
            trace(&|u| r0 - d * (1.0 - (2.0 * PI * k * u).cos()) / 2.0),
            trace(&|u| r0 - d * (1.0 + (2.0 * PI * k * u).cos()) / 2.0),
        ],
    };
    tracks.into_iter().map(|ranges| ScattererTrack::new(ranges, rcs)).collect()
}
