//! Isodata (iterative intermeans) background thresholding.

use super::Spectrogram;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 10_000;

fn split_means(values: &[f64], t: f64) -> (Option<f64>, Option<f64>) {
    let (mut lo, mut n_lo, mut hi, mut n_hi) = (0.0, 0usize, 0.0, 0usize);
    for &v in values {
        if v < t {
            lo += v;
            n_lo += 1;
        } else {
            hi += v;
            n_hi += 1;
        }
    }
    let mean = |s: f64, n: usize| (n > 0).then(|| s / n as f64);
    (mean(lo, n_lo), mean(hi, n_hi))
}

/// Finds the isodata threshold and zeroes every bin below it.
///
/// Starts at the global mean and iterates `T ← (mean(v < T) + mean(v ≥ T)) / 2`
/// until the update moves less than `1e-6` of the dynamic range. A constant
/// image returns that constant and is left untouched.
pub fn isodata_threshold(spec: &Spectrogram) -> Result<(f64, Spectrogram)> {
    if spec.is_empty() {
        return Err(Error::shape("empty spectrogram"));
    }
    let values = &spec.values;
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if max == min {
        return Ok((min, spec.clone()));
    }
    let tol = 1e-6 * (max - min);
    let mut t = values.iter().sum::<f64>() / values.len() as f64;
    for _ in 0..MAX_ITERATIONS {
        let next = match split_means(values, t) {
            (Some(lo), Some(hi)) => (lo + hi) / 2.0,
            // unreachable from the mean start; keep the current value
            _ => t,
        };
        let done = (next - t).abs() < tol;
        t = next;
        if done {
            break;
        }
    }
    let mut out = spec.clone();
    for v in out.values.iter_mut() {
        if *v < t {
            *v = 0.0;
        }
    }
    Ok((t, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_image_splits_in_the_middle() {
        let rows = vec![vec![1.0, 1.0, 9.0, 9.0], vec![1.0, 9.0, 1.0, 9.0]];
        let spec = Spectrogram::from_rows(&rows).unwrap();
        let (t, out) = isodata_threshold(&spec).unwrap();
        assert!((t - 5.0).abs() < 1e-12);
        for (a, b) in spec.values.iter().zip(&out.values) {
            assert_eq!(*b, if *a == 1.0 { 0.0 } else { 9.0 });
        }
    }

    #[test]
    fn constant_image_is_untouched() {
        let spec = Spectrogram::from_rows(&vec![vec![3.0; 5]; 4]).unwrap();
        let (t, out) = isodata_threshold(&spec).unwrap();
        assert_eq!(t, 3.0);
        assert_eq!(out, spec);
    }

    #[test]
    fn thresholding_twice_changes_nothing() {
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|r| (0..8).map(|c| ((r * 7 + c * 3) % 11) as f64).collect())
            .collect();
        let spec = Spectrogram::from_rows(&rows).unwrap();
        let (t, once) = isodata_threshold(&spec).unwrap();
        let mut twice = once.clone();
        for v in twice.values.iter_mut() {
            if *v < t {
                *v = 0.0;
            }
        }
        assert_eq!(once, twice);
    }
}
