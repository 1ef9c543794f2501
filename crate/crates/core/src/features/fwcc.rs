//! Frequency-warped cepstral coefficients.
//!
//! ```text
//! E(n, m) = ln max(Σ_k S(n, k)·h_m(k), ε)
//! C(j, n) = Σ_{m=1..M} E(n, m)·cos(j·(m − ½)·π / M),   j = 1..J
//! ```

use std::f64::consts::PI;

use super::FilterBank;
use crate::dsp::Spectrogram;
use crate::error::{Error, Result};

pub const CEPSTRA: usize = 5;
/// Floor applied to filter energies before the logarithm.
pub const LOG_FLOOR: f64 = 1e-12;

/// `C(j, n)` as a `J × T` row-major matrix.
pub fn fwcc_matrix(spec: &Spectrogram, bank: &FilterBank, n_cepstra: usize) -> Result<Vec<f64>> {
    bank.validate()?;
    if n_cepstra == 0 {
        return Err(Error::domain("need at least one cepstral coefficient"));
    }
    if bank.n_bins != spec.n_freq {
        return Err(Error::domain(format!(
            "bank covers {} bins, spectrogram has {}",
            bank.n_bins, spec.n_freq
        )));
    }
    let m_count = bank.len();
    let t_count = spec.n_time;
    let responses = bank.responses();

    let mut energies = vec![0.0; t_count * m_count];
    for (m, h) in responses.iter().enumerate() {
        let support: Vec<(usize, f64)> = h.iter().copied().enumerate().filter(|(_, w)| *w > 0.0).collect();
        for n in 0..t_count {
            let e: f64 = support.iter().map(|&(k, w)| spec.get(k, n) * w).sum();
            energies[n * m_count + m] = e.max(LOG_FLOOR).ln();
        }
    }

    let cosines: Vec<f64> = (1..=n_cepstra)
        .flat_map(|j| {
            (1..=m_count).map(move |m| (j as f64 * (m as f64 - 0.5) * PI / m_count as f64).cos())
        })
        .collect();
    let mut out = vec![0.0; n_cepstra * t_count];
    for j in 0..n_cepstra {
        let cos_j = &cosines[j * m_count..(j + 1) * m_count];
        for n in 0..t_count {
            let e = &energies[n * m_count..(n + 1) * m_count];
            out[j * t_count + n] = e.iter().zip(cos_j).map(|(a, b)| a * b).sum();
        }
    }
    Ok(out)
}

/// Vectorised FWCC features; `J·T` values (325 for J = 5, T = 65).
pub fn fwcc(spec: &Spectrogram, bank: &FilterBank, n_cepstra: usize) -> Result<Vec<f64>> {
    fwcc_matrix(spec, bank, n_cepstra)
}
