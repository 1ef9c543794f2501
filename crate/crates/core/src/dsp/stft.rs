//! Micro-Doppler spectrogram: squared magnitude of a Hann-windowed STFT.
//!
//! Frames are unnormalised, so each column sums to `W · Σ|w·x|²` over its
//! segment (Parseval for the plain DFT).

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{fftshift, shifted_freqs, Spectrogram};
use crate::error::{Error, Result};
use crate::sim::IqSeries;

pub const DEFAULT_WINDOW_LEN: usize = 128;
pub const DEFAULT_OVERLAP: f64 = 0.5;

/// Periodic Hann window, `0.5 − 0.5·cos(2πn/W)`.
pub fn hann_window(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
        .collect()
}

pub(crate) fn hop_len(window_len: usize, overlap_frac: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&overlap_frac) {
        return Err(Error::domain(format!("overlap {overlap_frac} outside [0, 1)")));
    }
    Ok(((window_len as f64 * (1.0 - overlap_frac)).round() as usize).max(1))
}

pub fn stft_spectrogram(iq: &IqSeries, window_len: usize, overlap_frac: f64) -> Result<Spectrogram> {
    if window_len == 0 {
        return Err(Error::domain("window length must be > 0"));
    }
    if window_len > iq.len() {
        return Err(Error::shape(format!("window {window_len} longer than series {}", iq.len())));
    }
    let hop = hop_len(window_len, overlap_frac)?;
    let n_frames = (iq.len() - window_len) / hop + 1;
    let window = hann_window(window_len);
    let fft = FftPlanner::new().plan_fft_forward(window_len);

    let mut values = vec![0.0; window_len * n_frames];
    let mut buf = vec![Complex64::new(0.0, 0.0); window_len];
    for t in 0..n_frames {
        let seg = &iq.samples[t * hop..t * hop + window_len];
        for ((b, s), w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = s * w;
        }
        fft.process(&mut buf);
        for (row, v) in fftshift(&buf).iter().enumerate() {
            values[row * n_frames + t] = v.norm_sqr();
        }
    }
    let freq_axis = shifted_freqs(window_len, iq.sample_rate);
    let time_axis = (0..n_frames)
        .map(|t| (t * hop) as f64 / iq.sample_rate + window_len as f64 / (2.0 * iq.sample_rate))
        .collect();
    Spectrogram::new(window_len, n_frames, values, freq_axis, time_axis)
}
