//! Bilinear resampling onto a fixed grid (corner-aligned).

use super::Spectrogram;
use crate::error::{Error, Result};

/// Target side length shared by every sensor.
pub const DEFAULT_SIZE: usize = 65;

/// Source coordinate of target index `i`, corners aligned.
fn source_coord(i: usize, n_in: usize, n_out: usize) -> (usize, f64) {
    let x = i as f64 * (n_in - 1) as f64 / (n_out - 1) as f64;
    let i0 = (x.floor() as usize).min(n_in - 2);
    (i0, x - i0 as f64)
}

fn resample_axis(axis: &[f64], n_out: usize) -> Vec<f64> {
    (0..n_out)
        .map(|i| {
            let (i0, w) = source_coord(i, axis.len(), n_out);
            axis[i0] * (1.0 - w) + axis[i0 + 1] * w
        })
        .collect()
}

pub fn resize_spectrogram(spec: &Spectrogram, out_rows: usize, out_cols: usize) -> Result<Spectrogram> {
    if out_rows < 2 || out_cols < 2 {
        return Err(Error::domain(format!("target {out_rows}x{out_cols} must be at least 2x2")));
    }
    if spec.n_freq < 2 || spec.n_time < 2 {
        return Err(Error::shape(format!("source {}x{} must be at least 2x2", spec.n_freq, spec.n_time)));
    }
    if spec.n_freq == out_rows && spec.n_time == out_cols {
        return Ok(spec.clone());
    }
    let cols: Vec<(usize, f64)> = (0..out_cols).map(|j| source_coord(j, spec.n_time, out_cols)).collect();
    let mut values = Vec::with_capacity(out_rows * out_cols);
    for i in 0..out_rows {
        let (r0, wr) = source_coord(i, spec.n_freq, out_rows);
        for &(c0, wc) in &cols {
            let top = spec.get(r0, c0) * (1.0 - wc) + spec.get(r0, c0 + 1) * wc;
            let bottom = spec.get(r0 + 1, c0) * (1.0 - wc) + spec.get(r0 + 1, c0 + 1) * wc;
            values.push((top * (1.0 - wr) + bottom * wr).max(0.0));
        }
    }
    Spectrogram::new(
        out_rows,
        out_cols,
        values,
        resample_axis(&spec.freq_axis, out_rows),
        resample_axis(&spec.time_axis, out_cols),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_size_is_exact() {
        let rows: Vec<Vec<f64>> = (0..65).map(|r| (0..65).map(|c| (r * c) as f64).collect()).collect();
        let spec = Spectrogram::from_rows(&rows).unwrap();
        assert_eq!(resize_spectrogram(&spec, 65, 65).unwrap(), spec);
    }

    #[test]
    fn constants_are_preserved() {
        let spec = Spectrogram::from_rows(&vec![vec![2.5; 40]; 17]).unwrap();
        let out = resize_spectrogram(&spec, 65, 65).unwrap();
        assert!(out.values.iter().all(|&v| (v - 2.5).abs() < 1e-12));
        assert!(out.freq_axis.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn degenerate_target_rejected() {
        let spec = Spectrogram::from_rows(&vec![vec![1.0; 4]; 4]).unwrap();
        assert!(matches!(resize_spectrogram(&spec, 1, 65), Err(Error::Domain(_))));
    }
}
