use crate::sim::doppler_to_velocity;
use crate::dsp::RangeDopplerCube;
use crate::error::{Error, Result};

pub const DEFAULT_VELOCITY_BINS: usize = 64;

/// Velocity-vs-time histogram weighted by RD-map intensity.
/// Row-major: `values[bin * n_frames + frame]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IwvDiagram {
    pub n_bins: usize,
    pub n_frames: usize,
    pub values: Vec<f64>,
    /// Bin centres, m/s.
    pub velocity_axis: Vec<f64>,
    pub frame_rate: f64,
}

impl IwvDiagram {
    pub fn row(&self, bin: usize) -> &[f64] {
        &self.values[bin * self.n_frames..(bin + 1) * self.n_frames]
    }

    pub fn column_sum(&self, frame: usize) -> f64 {
        (0..self.n_bins).map(|b| self.values[b * self.n_frames + frame]).sum()
    }

    /// A single-row diagram, e.g. to analyse one time series directly.
    pub fn from_series(series: &[f64], frame_rate: f64) -> Self {
        Self {
            n_bins: 1,
            n_frames: series.len(),
            values: series.to_vec(),
            velocity_axis: vec![0.0],
            frame_rate,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# velocity_mps,frames...\n");
        for b in 0..self.n_bins {
            out.push_str(&format!("{}", self.velocity_axis[b]));
            for v in self.row(b) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Maps every RD pixel to its radial velocity and accumulates its intensity
/// into `n_velocity_bins` uniform bins spanning the cube's velocity range.
pub fn iwv_diagram(cube: &RangeDopplerCube, fc: f64, n_velocity_bins: usize) -> Result<IwvDiagram> {
    if cube.values.is_empty() || cube.n_frames == 0 {
        return Err(Error::shape("empty cube"));
    }
    if n_velocity_bins < 2 {
        return Err(Error::domain("need at least 2 velocity bins"));
    }
    if !(fc > 0.0) {
        return Err(Error::domain("carrier frequency must be > 0"));
    }
    let velocities: Vec<f64> = cube.doppler_axis().iter().map(|&fd| doppler_to_velocity(fd, fc)).collect();
    let v_min = velocities[0];
    let v_max = *velocities.last().unwrap();
    let extent = v_max - v_min;
    if !(extent > 0.0) {
        return Err(Error::domain("cube spans a zero-width velocity range"));
    }
    let bin_of: Vec<usize> = velocities
        .iter()
        .map(|v| (((v - v_min) / extent * n_velocity_bins as f64).floor() as usize).min(n_velocity_bins - 1))
        .collect();

    let n_frames = cube.n_frames;
    let mut values = vec![0.0; n_velocity_bins * n_frames];
    for f in 0..n_frames {
        for row in cube.frame(f).chunks(cube.n_doppler) {
            for (d, &v) in row.iter().enumerate() {
                values[bin_of[d] * n_frames + f] += v;
            }
        }
    }
    let width = extent / n_velocity_bins as f64;
    Ok(IwvDiagram {
        n_bins: n_velocity_bins,
        n_frames,
        values,
        velocity_axis: (0..n_velocity_bins).map(|i| v_min + (i as f64 + 0.5) * width).collect(),
        frame_rate: cube.frame_rate,
    })
}
