//! Range-Doppler-time cube from FMCW beat data.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{fftshift, shifted_freqs};
use crate::error::{Error, Result};
use crate::sim::{IqSeries, RadarConfig};

/// Magnitude cube stored frame-major: index `(frame·n_range + range)·n_doppler + doppler`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerCube {
    pub n_range: usize,
    pub n_doppler: usize,
    pub n_frames: usize,
    pub values: Vec<f64>,
    /// c / (2·bandwidth) of the generating sensor, m.
    pub range_bin_m: f64,
    pub doppler_bin_hz: f64,
    /// Frames per second.
    pub frame_rate: f64,
}

impl RangeDopplerCube {
    #[inline]
    pub fn get(&self, range: usize, doppler: usize, frame: usize) -> f64 {
        self.values[(frame * self.n_range + range) * self.n_doppler + doppler]
    }

    pub fn frame(&self, frame: usize) -> &[f64] {
        let len = self.n_range * self.n_doppler;
        &self.values[frame * len..(frame + 1) * len]
    }

    /// Doppler frequency of each (fft-shifted) Doppler bin, Hz.
    pub fn doppler_axis(&self) -> Vec<f64> {
        shifted_freqs(self.n_doppler, self.doppler_bin_hz * self.n_doppler as f64)
    }

    pub fn frame_sum(&self, frame: usize) -> f64 {
        self.frame(frame).iter().sum()
    }

    /// Strongest (range, doppler) cell of a frame, lowest index on ties.
    pub fn peak(&self, frame: usize) -> (usize, usize) {
        let f = self.frame(frame);
        let mut best = 0;
        for (i, v) in f.iter().enumerate() {
            if *v > f[best] {
                best = i;
            }
        }
        (best / self.n_doppler, best % self.n_doppler)
    }

    /// Doppler profile of a frame summed over range bins.
    pub fn doppler_profile(&self, frame: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_doppler];
        for row in self.frame(frame).chunks(self.n_doppler) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }
}

/// Builds `frames` consecutive, non-overlapping range-Doppler maps.
///
/// Each frame takes `doppler_window` sweeps of `samples_per_sweep` fast-time
/// samples, FFTs fast time into range bins and slow time into zero-centred
/// Doppler bins, and stores the magnitude.
pub fn range_doppler_cube(
    iq: &IqSeries,
    config: &RadarConfig,
    samples_per_sweep: usize,
    frames: usize,
    doppler_window: usize,
) -> Result<RangeDopplerCube> {
    config.validate()?;
    if samples_per_sweep == 0 || frames == 0 || doppler_window == 0 {
        return Err(Error::domain("cube dimensions must be > 0"));
    }
    let needed = samples_per_sweep * doppler_window * frames;
    if iq.len() < needed {
        return Err(Error::shape(format!("cube needs {needed} samples, series has {}", iq.len())));
    }
    let mut planner = FftPlanner::new();
    let range_fft = planner.plan_fft_forward(samples_per_sweep);
    let doppler_fft = planner.plan_fft_forward(doppler_window);

    let (nr, nd) = (samples_per_sweep, doppler_window);
    let mut values = Vec::with_capacity(nr * nd * frames);
    let mut block = vec![Complex64::new(0.0, 0.0); nr * nd];
    let mut slow = vec![Complex64::new(0.0, 0.0); nd];
    for f in 0..frames {
        let start = f * nr * nd;
        // block[sweep][range]
        block.copy_from_slice(&iq.samples[start..start + nr * nd]);
        for sweep in block.chunks_mut(nr) {
            range_fft.process(sweep);
        }
        for r in 0..nr {
            for (s, v) in slow.iter_mut().enumerate() {
                *v = block[s * nr + r];
            }
            doppler_fft.process(&mut slow);
            values.extend(fftshift(&slow).iter().map(|v| v.norm()));
        }
    }
    Ok(RangeDopplerCube {
        n_range: nr,
        n_doppler: nd,
        n_frames: frames,
        values,
        range_bin_m: config.range_resolution(),
        doppler_bin_hz: config.sweep_rate / nd as f64,
        frame_rate: config.sweep_rate / nd as f64,
    })
}
