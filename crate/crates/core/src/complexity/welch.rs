//! Welch PSD of each velocity row over time.
//!
//! Segments are Hann-windowed with the given overlap. The segment mean is
//! removed before windowing and its power is reported in the DC bin alone,
//! so a large static component does not leak into the lowest non-DC bins.
//! Scaling is a one-sided density: `|X_k|² / (fs·Σw²)`, doubled for bins
//! other than DC and Nyquist.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::IwvDiagram;
use crate::dsp::hann_window;
use crate::error::{Error, Result};

pub const DEFAULT_SEGMENT_LEN: usize = 64;

/// `values[row * n_freqs + k]`, frequencies `k·fs/segment_len` for k = 0..=L/2.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdMatrix {
    pub n_rows: usize,
    pub n_freqs: usize,
    pub values: Vec<f64>,
    pub freq_axis: Vec<f64>,
    /// Segments averaged per row.
    pub n_segments: usize,
}

impl PsdMatrix {
    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.n_freqs..(j + 1) * self.n_freqs]
    }

    /// Sum over velocity rows.
    pub fn integrated(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_freqs];
        for j in 0..self.n_rows {
            for (o, v) in out.iter_mut().zip(self.row(j)) {
                *o += v;
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# freq_hz");
        for f in &self.freq_axis {
            out.push_str(&format!(",{f}"));
        }
        out.push('\n');
        for j in 0..self.n_rows {
            let line: Vec<String> = self.row(j).iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn welch_psd(iwv: &IwvDiagram, segment_len: usize, overlap_frac: f64) -> Result<PsdMatrix> {
    if segment_len < 2 {
        return Err(Error::domain("segment length must be >= 2"));
    }
    if segment_len > iwv.n_frames {
        return Err(Error::shape(format!(
            "segment of {segment_len} frames longer than diagram ({})",
            iwv.n_frames
        )));
    }
    if !(0.0..1.0).contains(&overlap_frac) {
        return Err(Error::domain(format!("overlap {overlap_frac} outside [0, 1)")));
    }
    if !(iwv.frame_rate > 0.0) {
        return Err(Error::domain("frame rate must be > 0"));
    }
    let hop = ((segment_len as f64 * (1.0 - overlap_frac)).round() as usize).max(1);
    let n_segments = (iwv.n_frames - segment_len) / hop + 1;
    let n_freqs = segment_len / 2 + 1;
    let window = hann_window(segment_len);
    let w_sum: f64 = window.iter().sum();
    let w_energy: f64 = window.iter().map(|w| w * w).sum();
    let scale = 1.0 / (iwv.frame_rate * w_energy);
    let fft = FftPlanner::new().plan_fft_forward(segment_len);

    let mut values = vec![0.0; iwv.n_bins * n_freqs];
    let mut buf = vec![Complex64::new(0.0, 0.0); segment_len];
    for j in 0..iwv.n_bins {
        let row = iwv.row(j);
        let out = &mut values[j * n_freqs..(j + 1) * n_freqs];
        for s in 0..n_segments {
            let seg = &row[s * hop..s * hop + segment_len];
            let mean = seg.iter().sum::<f64>() / segment_len as f64;
            for ((b, x), w) in buf.iter_mut().zip(seg).zip(&window) {
                *b = Complex64::new((x - mean) * w, 0.0);
            }
            fft.process(&mut buf);
            out[0] += (mean * w_sum).powi(2) * scale;
            for k in 1..n_freqs {
                let one_sided = if 2 * k == segment_len { 1.0 } else { 2.0 };
                out[k] += buf[k].norm_sqr() * scale * one_sided;
            }
        }
        out.iter_mut().for_each(|v| *v /= n_segments as f64);
    }
    Ok(PsdMatrix {
        n_rows: iwv.n_bins,
        n_freqs,
        values,
        freq_axis: (0..n_freqs).map(|k| k as f64 * iwv.frame_rate / segment_len as f64).collect(),
        n_segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_row_puts_everything_at_dc() {
        let iwv = IwvDiagram::from_series(&[2.0; 256], 10.0);
        let psd = welch_psd(&iwv, 64, 0.5).unwrap();
        assert!(psd.row(0)[0] > 0.0);
        assert!(psd.row(0)[1..].iter().all(|&v| v.abs() < 1e-20));
        assert_eq!(psd.n_segments, 7);
    }

    #[test]
    fn segment_longer_than_series_rejected() {
        let iwv = IwvDiagram::from_series(&[1.0; 10], 1.0);
        assert!(matches!(welch_psd(&iwv, 16, 0.5), Err(Error::Shape(_))));
    }

    #[test]
    fn sine_peaks_at_its_frequency() {
        let fs = 64.0;
        let series: Vec<f64> = (0..512).map(|n| (2.0 * std::f64::consts::PI * 8.0 * n as f64 / fs).sin()).collect();
        let psd = welch_psd(&IwvDiagram::from_series(&series, fs), 64, 0.5).unwrap();
        let row = psd.row(0);
        let argmax = (0..row.len()).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
        assert_eq!(psd.freq_axis[argmax], 8.0);
    }
}
