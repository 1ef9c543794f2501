//! Clutter-removal high-pass filter.
//!
//! Fourth-order Butterworth, realised as cascaded biquads from the bilinear
//! transform with frequency pre-warping, applied forward then backward so the
//! net response is zero-phase with squared magnitude. Edges are handled with
//! odd extension and steady-state initial conditions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sim::IqSeries;

pub const HPF_ORDER: usize = 4;
pub const DEFAULT_HPF_CUTOFF_HZ: f64 = 15.0;

/// Second-order section, `a[0]` normalised to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    pub fn dc_gain(&self) -> f64 {
        self.b.iter().sum::<f64>() / self.a.iter().sum::<f64>()
    }

    /// Frequency response at `f` Hz for sample rate `fs`.
    pub fn response(&self, f: f64, fs: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -2.0 * PI * f / fs);
        let z2 = z1 * z1;
        (self.b[0] + self.b[1] * z1 + self.b[2] * z2) / (self.a[0] + self.a[1] * z1 + self.a[2] * z2)
    }

    /// Transposed direct-form II state for a unit step already at steady state.
    fn steady_state(&self) -> [f64; 2] {
        let g = self.dc_gain();
        let z2 = self.b[2] - self.a[2] * g;
        let z1 = self.b[1] - self.a[1] * g + z2;
        [z1, z2]
    }
}

/// Butterworth high-pass of even `order` as `order / 2` biquads.
pub fn butterworth_highpass(order: usize, cutoff_hz: f64, fs: f64) -> Result<Vec<Biquad>> {
    if order == 0 || !order.is_multiple_of(2) {
        return Err(Error::domain(format!("order must be even and > 0, got {order}")));
    }
    if !(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0) {
        return Err(Error::domain(format!("cutoff {cutoff_hz} Hz outside (0, {}) Hz", fs / 2.0)));
    }
    let k = 2.0 * fs;
    let wc = k * (PI * cutoff_hz / fs).tan();
    let sections = (1..=order / 2)
        .map(|i| {
            // conjugate pole pair of the analogue prototype, s² + q·s + wc²
            let theta = PI * (2 * i - 1) as f64 / (2 * order) as f64;
            let q = 2.0 * wc * theta.sin();
            let a0 = k * k + q * k + wc * wc;
            let a1 = 2.0 * (wc * wc - k * k);
            let a2 = k * k - q * k + wc * wc;
            let g = k * k / a0;
            Biquad { b: [g, -2.0 * g, g], a: [1.0, a1 / a0, a2 / a0] }
        })
        .collect();
    Ok(sections)
}

fn sosfilt(sections: &[Biquad], x: &[Complex64], x0: Complex64) -> Vec<Complex64> {
    let mut y = x.to_vec();
    let mut level = x0;
    for s in sections {
        let [u1, u2] = s.steady_state();
        let (mut z1, mut z2) = (level * u1, level * u2);
        for v in y.iter_mut() {
            let input = *v;
            let out = s.b[0] * input + z1;
            z1 = s.b[1] * input - s.a[1] * out + z2;
            z2 = s.b[2] * input - s.a[2] * out;
            *v = out;
        }
        level *= s.dc_gain();
    }
    y
}

/// Zero-phase forward-backward application of `sections`.
pub(crate) fn filtfilt(sections: &[Biquad], x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    if n < 2 {
        return x.iter().map(|v| v * sections.iter().map(Biquad::dc_gain).product::<f64>()).collect();
    }
    let pad = (3 * (2 * sections.len() + 1)).min(n - 1);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

    let fwd = sosfilt(sections, &ext, ext[0]);
    let rev: Vec<Complex64> = fwd.into_iter().rev().collect();
    let back = sosfilt(sections, &rev, rev[0]);
    back.into_iter().rev().skip(pad).take(n).collect()
}

/// Removes stationary clutter below `cutoff_hz`.
pub fn highpass_filter(iq: &IqSeries, cutoff_hz: f64) -> Result<IqSeries> {
    let sections = butterworth_highpass(HPF_ORDER, cutoff_hz, iq.sample_rate)?;
    Ok(IqSeries { samples: filtfilt(&sections, &iq.samples), sample_rate: iq.sample_rate })
}
