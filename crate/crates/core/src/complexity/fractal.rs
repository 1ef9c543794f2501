use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{welch_psd, IwvDiagram, PsdMatrix};
use crate::error::{Error, Result};

/// Power-law fit `ln M = ln_a − beta·ln f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractalFit {
    pub beta: f64,
    pub ln_a: f64,
    pub r2: f64,
    /// Points entering the regression.
    pub n_used: usize,
    /// Positive-frequency bins dropped for non-positive magnitude.
    pub n_excluded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityBins {
    Bin(usize),
    /// Integrate over all velocity bins first (β̄).
    All,
}

/// Ordinary least squares of `ln m` on `ln f` over points with f > 0 and m > 0.
pub fn fit_power_law(freqs: &[f64], mags: &[f64]) -> Result<FractalFit> {
    if freqs.len() != mags.len() {
        return Err(Error::shape("frequency and magnitude lengths differ"));
    }
    let mut n_excluded = 0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&f, &m) in freqs.iter().zip(mags) {
        if !(f > 0.0) {
            continue;
        }
        if m > 0.0 && m.is_finite() {
            xs.push(f.ln());
            ys.push(m.ln());
        } else {
            n_excluded += 1;
        }
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("{n} usable frequency bins, need 3")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all usable bins share one frequency".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(FractalFit { beta: -slope, ln_a: intercept, r2, n_used: n, n_excluded })
}

pub fn fit_fractal(psd: &PsdMatrix, bins: VelocityBins) -> Result<FractalFit> {
    match bins {
        VelocityBins::Bin(j) if j >= psd.n_rows => {
            Err(Error::domain(format!("velocity bin {j} out of range ({} rows)", psd.n_rows)))
        }
        VelocityBins::Bin(j) => fit_power_law(&psd.freq_axis, psd.row(j)),
        VelocityBins::All => fit_power_law(&psd.freq_axis, &psd.integrated()),
    }
}

/// β̄ of one diagram: Welch PSD, integrate over velocity, fit.
pub fn beta_bar(iwv: &IwvDiagram, segment_len: usize) -> Result<f64> {
    beta_bar_with(iwv, segment_len, 0.5)
}

pub fn beta_bar_with(iwv: &IwvDiagram, segment_len: usize, overlap_frac: f64) -> Result<f64> {
    let psd = welch_psd(iwv, segment_len, overlap_frac)?;
    Ok(fit_fractal(&psd, VelocityBins::All)?.beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexitySummary {
    pub mean_beta: f64,
    /// Sample standard deviation (0 for a single sample).
    pub std_beta: f64,
    /// Half-width of the normal-approximation 95% interval on the mean.
    pub ci95: f64,
    pub n: usize,
}

/// Mean and spread of β̄ per labelled group.
pub fn compare_complexity(
    groups: &BTreeMap<String, Vec<IwvDiagram>>,
    segment_len: usize,
) -> Result<BTreeMap<String, ComplexitySummary>> {
    let mut out = BTreeMap::new();
    for (label, diagrams) in groups {
        if diagrams.is_empty() {
            return Err(Error::domain(format!("group '{label}' is empty")));
        }
        let betas = diagrams
            .par_iter()
            .map(|d| beta_bar(d, segment_len))
            .collect::<Result<Vec<f64>>>()?;
        out.insert(label.clone(), summarize_betas(&betas)?);
    }
    Ok(out)
}

/// Mean, sample deviation and 95% half-width of a set of β̄ values.
pub fn summarize_betas(betas: &[f64]) -> Result<ComplexitySummary> {
    let n = betas.len();
    if n == 0 {
        return Err(Error::domain("no β̄ values to summarize"));
    }
    let mean = betas.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (betas.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(ComplexitySummary { mean_beta: mean, std_beta: std, ci95: 1.96 * std / (n as f64).sqrt(), n })
}

pub fn comparison_report(summary: &BTreeMap<String, ComplexitySummary>) -> String {
    let mut out = String::from("label,mean_beta_bar,std,ci95,n\n");
    for (label, s) in summary {
        out.push_str(&format!("{label},{:.6},{:.6},{:.6},{}\n", s.mean_beta, s.std_beta, s.ci95, s.n));
    }
    out
}

/// Real Gaussian series whose power spectrum falls as `1 / f^beta`.
///
/// Spectral shaping: Gaussian Fourier coefficients scaled by `f^(−β/2)`,
/// zero mean, Hermitian-symmetric, inverse-transformed.
pub fn power_law_noise(n: usize, beta: f64, seed: u64) -> Vec<f64> {
    if n < 2 {
        return vec![0.0; n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..=n / 2 {
        let amp = (k as f64).powf(-beta / 2.0);
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let c = if 2 * k == n { Complex64::new(re * amp, 0.0) } else { Complex64::new(re, im) * amp };
        spectrum[k] = c;
        spectrum[n - k] = c.conj();
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);
    spectrum.iter().map(|c| c.re / (n as f64).sqrt()).collect()
}
