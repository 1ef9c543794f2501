//! Spectrogram and range-Doppler processing.

mod cube;
mod export;
mod filter;
mod hull;
mod isodata;
mod resize;
mod stft;

use crate::error::{Error, Result};

pub use cube::{range_doppler_cube, RangeDopplerCube};
pub use export::{
    decode_cube, decode_spectrogram, encode_cube, encode_spectrogram, spectrogram_to_csv, spectrogram_to_pgm,
    CUBE_MAGIC, PGM_FLOOR_DB, SPEC_MAGIC,
};
pub use filter::{butterworth_highpass, highpass_filter, Biquad, DEFAULT_HPF_CUTOFF_HZ, HPF_ORDER};
pub use hull::{convex_hull, pca_hull_area, polygon_area, saturation_ratio};
pub use isodata::isodata_threshold;
pub use resize::{resize_spectrogram, DEFAULT_SIZE};
pub use stft::{hann_window, stft_spectrogram, DEFAULT_OVERLAP, DEFAULT_WINDOW_LEN};

/// Time × Doppler magnitude image. Rows are Doppler bins (ascending
/// frequency, zero-centred), columns are time frames; storage is row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub n_freq: usize,
    pub n_time: usize,
    pub values: Vec<f64>,
    /// Hz per row.
    pub freq_axis: Vec<f64>,
    /// Seconds per column.
    pub time_axis: Vec<f64>,
}

impl Spectrogram {
    pub fn new(n_freq: usize, n_time: usize, values: Vec<f64>, freq_axis: Vec<f64>, time_axis: Vec<f64>) -> Result<Self> {
        if values.len() != n_freq * n_time || freq_axis.len() != n_freq || time_axis.len() != n_time {
            return Err(Error::shape(format!(
                "spectrogram {n_freq}x{n_time} given {} values, {} freqs, {} times",
                values.len(),
                freq_axis.len(),
                time_axis.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::domain("spectrogram values must be finite and >= 0"));
        }
        if freq_axis.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("frequency axis must be strictly increasing"));
        }
        Ok(Self { n_freq, n_time, values, freq_axis, time_axis })
    }

    /// Image with unit-spaced axes, handy for tests and synthetic inputs.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_freq = rows.len();
        let n_time = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_time) {
            return Err(Error::shape("ragged rows"));
        }
        let values = rows.concat();
        let freq_axis = (0..n_freq).map(|i| i as f64).collect();
        let time_axis = (0..n_time).map(|i| i as f64).collect();
        Self::new(n_freq, n_time, values, freq_axis, time_axis)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_time + col]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n_freq).map(|r| self.get(r, col)).collect()
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.n_time..(row + 1) * self.n_time]
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spacing between adjacent Doppler rows, Hz.
    pub fn freq_step(&self) -> f64 {
        if self.n_freq < 2 {
            return 0.0;
        }
        self.freq_axis[1] - self.freq_axis[0]
    }

    /// Row index whose frequency is closest to `hz`.
    pub fn nearest_row(&self, hz: f64) -> usize {
        let mut best = 0;
        for (i, f) in self.freq_axis.iter().enumerate() {
            if (f - hz).abs() < (self.freq_axis[best] - hz).abs() {
                best = i;
            }
        }
        best
    }

    /// Per-column argmax row (lowest row on ties).
    pub fn ridge(&self) -> Vec<usize> {
        (0..self.n_time)
            .map(|c| {
                let mut best = 0;
                for r in 1..self.n_freq {
                    if self.get(r, c) > self.get(best, c) {
                        best = r;
                    }
                }
                best
            })
            .collect()
    }
}

/// Reorders FFT output so the zero-frequency bin sits at index `n / 2`.
pub(crate) fn fftshift<T: Copy>(data: &[T]) -> Vec<T> {
    let n = data.len();
    let half = n / 2;
    (0..n).map(|i| data[(i + n - half) % n]).collect()
}

/// Frequencies of fft-shifted bins: `(i − n/2)·rate/n`.
pub(crate) fn shifted_freqs(n: usize, rate: f64) -> Vec<f64> {
    let half = (n / 2) as f64;
    (0..n).map(|i| (i as f64 - half) * rate / n as f64).collect()
}
