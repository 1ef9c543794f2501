use std::f64::consts::PI;

use crate::dsp::{Spectrogram, DEFAULT_SIZE};
use crate::error::{Error, Result};

pub const DCT_COUNT: usize = 500;

/// Orthonormal DCT-II basis, `basis[u * n + m]`.
fn basis(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for u in 0..n {
        let alpha = if u == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
        for m in 0..n {
            out[u * n + m] = alpha * (PI * (2 * m + 1) as f64 * u as f64 / (2 * n) as f64).cos();
        }
    }
    out
}

/// Separable orthonormal 2-D DCT-II of a row-major `rows × cols` image.
pub fn dct2_orthonormal(values: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    if values.len() != rows * cols {
        return Err(Error::shape(format!("{} values for a {rows}x{cols} image", values.len())));
    }
    let br = basis(rows);
    let bc = basis(cols);
    // along columns (second index) first
    let mut tmp = vec![0.0; rows * cols];
    for r in 0..rows {
        let row = &values[r * cols..(r + 1) * cols];
        for v in 0..cols {
            tmp[r * cols + v] = row.iter().zip(&bc[v * cols..(v + 1) * cols]).map(|(x, b)| x * b).sum();
        }
    }
    let mut out = vec![0.0; rows * cols];
    for u in 0..rows {
        let b = &br[u * rows..(u + 1) * rows];
        for v in 0..cols {
            out[u * cols + v] = (0..rows).map(|r| b[r] * tmp[r * cols + v]).sum();
        }
    }
    Ok(out)
}

/// JPEG-style zigzag scan from the low-frequency corner.
pub fn zigzag_order(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(rows * cols);
    for s in 0..rows + cols - 1 {
        let lo = s.saturating_sub(cols - 1);
        let hi = s.min(rows - 1);
        if s % 2 == 0 {
            out.extend((lo..=hi).rev().map(|r| (r, s - r)));
        } else {
            out.extend((lo..=hi).map(|r| (r, s - r)));
        }
    }
    out
}

/// First `n` zigzag-ordered DCT coefficients of a 65×65 spectrogram.
pub fn dct_features(spec: &Spectrogram, n: usize) -> Result<Vec<f64>> {
    if spec.n_freq != DEFAULT_SIZE || spec.n_time != DEFAULT_SIZE {
        return Err(Error::shape(format!(
            "DCT features need a {DEFAULT_SIZE}x{DEFAULT_SIZE} spectrogram, got {}x{}",
            spec.n_freq, spec.n_time
        )));
    }
    if n > spec.values.len() {
        return Err(Error::domain(format!("{n} coefficients requested from {}", spec.values.len())));
    }
    let coeffs = dct2_orthonormal(&spec.values, spec.n_freq, spec.n_time)?;
    Ok(zigzag_order(spec.n_freq, spec.n_time)
        .into_iter()
        .take(n)
        .map(|(r, c)| coeffs[r * spec.n_time + c])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zigzag_starts_like_jpeg() {
        let z = zigzag_order(3, 3);
        assert_eq!(&z[..6], &[(0, 0), (0, 1), (1, 0), (2, 0), (1, 1), (0, 2)]);
        assert_eq!(z.len(), 9);
        let z = zigzag_order(2, 4);
        let mut sorted = z.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
    }

    #[test]
    fn constant_image_has_only_dc() {
        let spec = Spectrogram::from_rows(&vec![vec![3.0; 65]; 65]).unwrap();
        let f = dct_features(&spec, 500).unwrap();
        assert!((f[0] - 3.0 * 65.0).abs() < 1e-9);
        assert!(f[1..].iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn wrong_size_rejected() {
        let spec = Spectrogram::from_rows(&vec![vec![1.0; 8]; 8]).unwrap();
        assert!(matches!(dct_features(&spec, 10), Err(Error::Shape(_))));
    }
}
