//! Percentile envelopes of the Doppler spread.

use crate::dsp::Spectrogram;
use crate::error::{Error, Result};

pub const ENVELOPE_COUNT: usize = 7;
pub const DEFAULT_PERCENTILE: f64 = 0.95;

/// Per-column (upper, lower) envelope frequencies, Hz.
///
/// The upper envelope is the first bin, scanning down from the top, at which
/// the energy above it reaches `(1 − percentile)` of the column energy; the
/// lower envelope is the mirror scan from the bottom. Empty columns give 0.
pub fn envelopes(spec: &Spectrogram, percentile: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if spec.is_empty() {
        return Err(Error::shape("empty spectrogram"));
    }
    if !(percentile > 0.0 && percentile < 1.0) {
        return Err(Error::domain(format!("percentile {percentile} outside (0, 1)")));
    }
    let mut upper = Vec::with_capacity(spec.n_time);
    let mut lower = Vec::with_capacity(spec.n_time);
    for c in 0..spec.n_time {
        let col = spec.column(c);
        let total: f64 = col.iter().sum();
        if total <= 0.0 {
            upper.push(0.0);
            lower.push(0.0);
            continue;
        }
        let target = (1.0 - percentile) * total;
        let scan = |order: &mut dyn Iterator<Item = usize>| {
            let mut cum = 0.0;
            for k in order {
                cum += col[k];
                if cum >= target && cum > 0.0 {
                    return spec.freq_axis[k];
                }
            }
            0.0
        };
        upper.push(scan(&mut (0..spec.n_freq).rev()));
        lower.push(scan(&mut (0..spec.n_freq)));
    }
    Ok((upper, lower))
}

/// `[max_up, min_up, mean_up, max_low, min_low, mean_low, mean_up − mean_low]`.
pub fn envelope_features(spec: &Spectrogram, percentile: f64) -> Result<[f64; ENVELOPE_COUNT]> {
    let (upper, lower) = envelopes(spec, percentile)?;
    let stats = |v: &[f64]| {
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        (max, min, v.iter().sum::<f64>() / v.len() as f64)
    };
    let (u_max, u_min, u_mean) = stats(&upper);
    let (l_max, l_min, l_mean) = stats(&lower);
    Ok([u_max, u_min, u_mean, l_max, l_min, l_mean, u_mean - l_mean])
}
