//! Synthetic radar returns from point-scatterer kinematics.
//!
//! The human body is modelled as a superposition of point scatterers, each
//! following a scripted radial trajectory. Returns are generated at complex
//! baseband (no carrier is simulated):
//!
//! ```text
//! x[n] = Σ_i a_i · exp(−j·4π·fc/c·R[n,i])
//! a_i  = √(Gtx·Grx) · λ · √(Pt·σ_i) / ((4π)^{3/2} · R_i² · √Ls · √La)
//! ```
//!
//! Positive Doppler corresponds to motion toward the sensor.

mod iqfile;
mod motion;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use iqfile::{read_iq, read_iq_csv, write_iq, write_iq_csv, IQ_MAGIC, IQ_VERSION};
pub use motion::{script_motion, MotionKind, ScriptParams, MAX_SPEED_MPS};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Transmit, antenna and waveform parameters of one sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarConfig {
    /// Carrier frequency, Hz.
    pub fc: f64,
    /// Sweep bandwidth, Hz.
    pub bandwidth: f64,
    /// Complex slow-time samples per second, Hz.
    pub sample_rate: f64,
    /// FMCW sweeps per second (PRF), Hz.
    pub sweep_rate: f64,
    pub g_tx: f64,
    pub g_rx: f64,
    /// Transmit power, W.
    pub p_t: f64,
    /// System loss, linear, >= 1.
    pub l_s: f64,
    /// Atmospheric loss, linear, >= 1.
    pub l_a: f64,
    pub rng_seed: u64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        Self::ti_77ghz()
    }
}

impl RadarConfig {
    /// Unit gains, 1 W transmit power and lossless propagation.
    pub fn with_carrier(fc: f64, bandwidth: f64, sample_rate: f64) -> Self {
        Self {
            fc,
            bandwidth,
            sample_rate,
            sweep_rate: sample_rate,
            g_tx: 1.0,
            g_rx: 1.0,
            p_t: 1.0,
            l_s: 1.0,
            l_a: 1.0,
            rng_seed: 0,
        }
    }

    /// UWB impulse sensor, 7.25-10.2 GHz band (centre 8.725 GHz, ~5 cm range bins).
    pub fn xethru_uwb() -> Self {
        Self::with_carrier(8.725e9, 2.95e9, 1000.0)
    }

    /// 24 GHz FMCW sensor with 1.5 GHz sweep (10 cm range bins).
    pub fn ancortek_24ghz() -> Self {
        Self::with_carrier(24.0e9, 1.5e9, 2000.0)
    }

    /// 77 GHz FMCW sensor with 750 MHz sweep (20 cm range bins).
    pub fn ti_77ghz() -> Self {
        Self::with_carrier(77.0e9, 750.0e6, 3000.0)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("fc", self.fc),
            ("bandwidth", self.bandwidth),
            ("sample_rate", self.sample_rate),
            ("sweep_rate", self.sweep_rate),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::domain(format!("{name} must be finite and > 0, got {value}")));
            }
        }
        for (name, value) in [("g_tx", self.g_tx), ("g_rx", self.g_rx), ("p_t", self.p_t)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::domain(format!("{name} must be finite and >= 0, got {value}")));
            }
        }
        if !(self.l_s >= 1.0 && self.l_a >= 1.0) || !self.l_s.is_finite() || !self.l_a.is_finite() {
            return Err(Error::domain("losses l_s and l_a must be >= 1"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.fc
    }

    /// c / (2·bandwidth), meters.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth)
    }
}

/// Sampled radial trajectory of one body-part scatterer.
#[derive(Debug, Clone, PartialEq)]
pub struct ScattererTrack {
    /// Radial distance per sample instant, m.
    pub ranges: Vec<f64>,
    /// Radar cross section, m².
    pub rcs: f64,
}

impl ScattererTrack {
    pub fn new(ranges: Vec<f64>, rcs: f64) -> Result<Self> {
        if !(rcs.is_finite() && rcs >= 0.0) {
            return Err(Error::domain(format!("rcs must be >= 0, got {rcs}")));
        }
        if let Some(r) = ranges.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::domain(format!("ranges must be > 0, got {r}")));
        }
        Ok(Self { ranges, rcs })
    }

    pub fn stationary(range: f64, rcs: f64, n_samples: usize) -> Result<Self> {
        Self::new(vec![range; n_samples], rcs)
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }
}

/// Complex baseband I/Q samples.
#[derive(Debug, Clone, PartialEq)]
pub struct IqSeries {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
}

impl IqSeries {
    pub fn new(samples: Vec<Complex64>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::domain(format!("sample rate must be > 0, got {sample_rate}")));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::domain("I/Q samples must be finite"));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn zeros(n: usize, sample_rate: f64) -> Self {
        Self { samples: vec![Complex64::new(0.0, 0.0); n], sample_rate }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of |x|².
    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

/// Received amplitude of one scatterer from the radar range equation.
pub fn received_amplitude(config: &RadarConfig, range: f64, rcs: f64) -> Result<f64> {
    if !(range.is_finite() && range > 0.0) {
        return Err(Error::domain(format!("range must be > 0, got {range}")));
    }
    if !(rcs.is_finite() && rcs >= 0.0) {
        return Err(Error::domain(format!("rcs must be >= 0, got {rcs}")));
    }
    let num = (config.g_tx * config.g_rx).sqrt() * config.wavelength() * (config.p_t * rcs).sqrt();
    let den = (4.0 * PI).powf(1.5) * range * range * config.l_s.sqrt() * config.l_a.sqrt();
    Ok(num / den)
}

#[inline]
fn two_way_phase(fc: f64, range: f64) -> f64 {
    -4.0 * PI * fc / SPEED_OF_LIGHT * range
}

/// Superposes the baseband returns of every track, one sample per instant.
pub fn synthesize_return(config: &RadarConfig, tracks: &[ScattererTrack], n_samples: usize) -> Result<IqSeries> {
    config.validate()?;
    check_lengths(tracks, n_samples)?;
    let mut samples = vec![Complex64::new(0.0, 0.0); n_samples];
    for track in tracks {
        for (x, &r) in samples.iter_mut().zip(&track.ranges) {
            let a = received_amplitude(config, r, track.rcs)?;
            *x += Complex64::from_polar(a, two_way_phase(config.fc, r));
        }
    }
    Ok(IqSeries { samples, sample_rate: config.sample_rate })
}

/// Dechirped FMCW beat signal, `samples_per_sweep` fast-time samples per sweep.
///
/// Track samples are taken one per sweep. A scatterer at range R produces a
/// beat tone of R/ΔR cycles per sweep, ΔR = c/(2·bandwidth), so range FFT bin
/// b corresponds to b·ΔR meters. The slow-time phase follows the baseband
/// model used by [`synthesize_return`].
pub fn synthesize_fmcw(
    config: &RadarConfig,
    tracks: &[ScattererTrack],
    n_sweeps: usize,
    samples_per_sweep: usize,
) -> Result<IqSeries> {
    config.validate()?;
    check_lengths(tracks, n_sweeps)?;
    if samples_per_sweep == 0 {
        return Err(Error::domain("samples_per_sweep must be > 0"));
    }
    let res = config.range_resolution();
    let mut samples = vec![Complex64::new(0.0, 0.0); n_sweeps * samples_per_sweep];
    for track in tracks {
        for (m, &r) in track.ranges.iter().enumerate() {
            let a = received_amplitude(config, r, track.rcs)?;
            let base = Complex64::from_polar(a, two_way_phase(config.fc, r));
            let cycles = r / res;
            let sweep = &mut samples[m * samples_per_sweep..(m + 1) * samples_per_sweep];
            for (k, x) in sweep.iter_mut().enumerate() {
                let beat = 2.0 * PI * cycles * k as f64 / samples_per_sweep as f64;
                *x += base * Complex64::from_polar(1.0, beat);
            }
        }
    }
    Ok(IqSeries { samples, sample_rate: config.sweep_rate * samples_per_sweep as f64 })
}

fn check_lengths(tracks: &[ScattererTrack], n: usize) -> Result<()> {
    for (i, t) in tracks.iter().enumerate() {
        if t.len() != n {
            return Err(Error::shape(format!("track {i} has {} samples, expected {n}", t.len())));
        }
    }
    Ok(())
}

/// Adds circularly-symmetric complex Gaussian noise at the requested SNR.
///
/// The noise draw is rescaled so its empirical power is exactly
/// `mean_power(iq) / 10^(snr_db/10)`. `f64::INFINITY` disables noise.
pub fn add_noise(iq: &IqSeries, snr_db: f64, seed: u64) -> Result<IqSeries> {
    if iq.is_empty() {
        return Err(Error::shape("cannot add noise to an empty series"));
    }
    if snr_db == f64::INFINITY {
        return Ok(iq.clone());
    }
    if snr_db.is_nan() {
        return Err(Error::domain("snr_db is NaN"));
    }
    let target = iq.mean_power() / 10f64.powf(snr_db / 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<Complex64> = (0..iq.len())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    let drawn = noise.iter().map(|n| n.norm_sqr()).sum::<f64>() / noise.len() as f64;
    let scale = if drawn > 0.0 { (target / drawn).sqrt() } else { 0.0 };
    let samples = iq.samples.iter().zip(&noise).map(|(x, n)| x + n * scale).collect();
    Ok(IqSeries { samples, sample_rate: iq.sample_rate })
}

/// Two-way Doppler shift 2·v·fc/c; positive for motion toward the sensor.
pub fn doppler_shift(v: f64, fc: f64) -> f64 {
    2.0 * v * fc / SPEED_OF_LIGHT
}

/// Inverse of [`doppler_shift`].
pub fn doppler_to_velocity(fd: f64, fc: f64) -> f64 {
    fd * SPEED_OF_LIGHT / (2.0 * fc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_config(fc: f64) -> RadarConfig {
        RadarConfig::with_carrier(fc, 750e6, 2000.0)
    }

    #[test]
    fn zero_rcs_gives_zero_amplitude() {
        assert_eq!(received_amplitude(&unit_config(24e9), 1.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn amplitude_falls_with_range_squared() {
        let cfg = unit_config(24e9);
        let a1 = received_amplitude(&cfg, 1.3, 0.2).unwrap();
        let a2 = received_amplitude(&cfg, 2.6, 0.2).unwrap();
        assert!((a1 / a2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn amplitude_matches_direct_evaluation() {
        let cfg = unit_config(24e9);
        let lambda = 299_792_458.0 / 24e9;
        let expected = lambda / (4.0 * std::f64::consts::PI).powf(1.5);
        let got = received_amplitude(&cfg, 1.0, 1.0).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn non_positive_range_rejected() {
        let cfg = unit_config(24e9);
        assert!(matches!(received_amplitude(&cfg, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(received_amplitude(&cfg, -1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn empty_track_list_is_silent() {
        let iq = synthesize_return(&unit_config(77e9), &[], 64).unwrap();
        assert_eq!(iq.len(), 64);
        assert!(iq.samples.iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn stationary_track_has_constant_phasor() {
        let cfg = unit_config(77e9);
        let r = 2.0;
        let track = ScattererTrack::stationary(r, 0.5, 32).unwrap();
        let iq = synthesize_return(&cfg, &[track], 32).unwrap();
        let expected = -4.0 * PI * cfg.fc * r / SPEED_OF_LIGHT;
        for s in &iq.samples {
            assert!((s.norm() - iq.samples[0].norm()).abs() < 1e-18);
            let d = (s.arg() - expected).rem_euclid(2.0 * PI);
            assert!(d < 1e-9 || 2.0 * PI - d < 1e-9);
        }
    }

    #[test]
    fn length_mismatch_is_a_shape_error() {
        let track = ScattererTrack::stationary(1.0, 1.0, 10).unwrap();
        let err = synthesize_return(&unit_config(24e9), &[track], 11).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn infinite_snr_is_identity() {
        let track = ScattererTrack::stationary(1.0, 1.0, 16).unwrap();
        let iq = synthesize_return(&unit_config(24e9), &[track], 16).unwrap();
        assert_eq!(add_noise(&iq, f64::INFINITY, 3).unwrap(), iq);
    }

    #[test]
    fn noise_is_seeded_and_hits_snr() {
        let n = 4096;
        let ranges = (0..n).map(|i| 1.0 + 1e-4 * i as f64).collect();
        let iq = synthesize_return(&unit_config(24e9), &[ScattererTrack::new(ranges, 1.0).unwrap()], n).unwrap();
        let a = add_noise(&iq, 10.0, 42).unwrap();
        let b = add_noise(&iq, 10.0, 42).unwrap();
        assert_eq!(a, b);
        let noise_power = a
            .samples
            .iter()
            .zip(&iq.samples)
            .map(|(x, s)| (x - s).norm_sqr())
            .sum::<f64>()
            / n as f64;
        let snr = 10.0 * (iq.mean_power() / noise_power).log10();
        assert!((snr - 10.0).abs() < 0.5, "measured snr {snr}");
    }

    #[test]
    fn zero_signal_gets_zero_noise() {
        let iq = IqSeries::zeros(8, 100.0);
        let out = add_noise(&iq, 0.0, 1).unwrap();
        assert_eq!(out.mean_power(), 0.0);
    }

    #[test]
    fn empty_series_rejected_by_noise() {
        assert!(matches!(add_noise(&IqSeries::zeros(0, 1.0), 3.0, 0), Err(Error::Shape(_))));
    }

    #[test]
    fn doppler_values() {
        assert_eq!(doppler_shift(0.0, 77e9), 0.0);
        let fd = doppler_shift(1.0, 77e9);
        assert!((fd - 2.0 * 77e9 / 299_792_458.0).abs() < 1e-9);
        assert!((fd - 513.69).abs() < 0.01);
        assert!(doppler_shift(0.5, 24e9) > 0.0);
        assert!((doppler_to_velocity(fd, 77e9) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn range_resolution_matches_bandwidth() {
        assert!((RadarConfig::ti_77ghz().range_resolution() - 0.19986).abs() < 1e-4);
        assert!((RadarConfig::ancortek_24ghz().range_resolution() - 0.09993).abs() < 1e-4);
        assert!((RadarConfig::xethru_uwb().range_resolution() - 0.0508).abs() < 1e-3);
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = unit_config(24e9);
        cfg.l_s = 0.5;
        assert!(cfg.validate().is_err());
        let mut cfg = unit_config(24e9);
        cfg.bandwidth = 0.0;
        assert!(cfg.validate().is_err());
    }
}
