//! Linear prediction, `s[n] = Σ_{k=1..p} a_k·s[n−k] + e[n]`.
//!
//! Coefficients come from the autocorrelation normal equations of the
//! mean-removed signal (biased estimator), solved by Levinson-Durbin. A
//! signal with no variance has singular equations and yields zeros.

use nalgebra::{DMatrix, DVector};

use crate::dsp::Spectrogram;
use crate::error::{Error, Result};

/// Per-pass order; two passes give 100 coefficients.
pub const LPC_ORDER: usize = 50;

fn autocorrelation(signal: &[f64], max_lag: usize) -> Vec<f64> {
    let n = signal.len();
    let mean = signal.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = signal.iter().map(|v| v - mean).collect();
    (0..=max_lag)
        .map(|lag| (lag..n).map(|i| x[i] * x[i - lag]).sum::<f64>() / n as f64)
        .collect()
}

fn check(signal: &[f64], order: usize) -> Result<()> {
    if order == 0 || order >= signal.len() {
        return Err(Error::domain(format!("order {order} must be in 1..{}", signal.len())));
    }
    Ok(())
}

/// Levinson-Durbin solution. If the prediction error vanishes before `order`
/// the remaining coefficients stay zero.
pub fn lpc(signal: &[f64], order: usize) -> Result<Vec<f64>> {
    check(signal, order)?;
    let r = autocorrelation(signal, order);
    let mut a = vec![0.0; order];
    if !(r[0] > 0.0) {
        return Ok(a);
    }
    let floor = 1e-12 * r[0];
    let mut err = r[0];
    for i in 0..order {
        let acc: f64 = r[i + 1] - (0..i).map(|k| a[k] * r[i - k]).sum::<f64>();
        let k = acc / err;
        let prev = a.clone();
        a[i] = k;
        for j in 0..i {
            a[j] = prev[j] - k * prev[i - 1 - j];
        }
        err *= 1.0 - k * k;
        if err <= floor {
            break;
        }
    }
    Ok(a)
}

/// Direct dense solve of the same Toeplitz normal equations.
pub fn lpc_least_squares(signal: &[f64], order: usize) -> Result<Vec<f64>> {
    check(signal, order)?;
    let r = autocorrelation(signal, order);
    if !(r[0] > 0.0) {
        return Ok(vec![0.0; order]);
    }
    let toeplitz = DMatrix::from_fn(order, order, |i, j| r[i.abs_diff(j)]);
    let rhs = DVector::from_iterator(order, r[1..].iter().copied());
    let sol = toeplitz
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::domain("singular normal equations"))?;
    Ok(sol.iter().copied().collect())
}

/// Predictors of the time-averaged Doppler profile, then of the
/// Doppler-averaged time profile.
pub fn lpc_features(spec: &Spectrogram, order_cols: usize, order_rows: usize) -> Result<Vec<f64>> {
    if spec.is_empty() {
        return Err(Error::shape("empty spectrogram"));
    }
    let mean_column: Vec<f64> = (0..spec.n_freq)
        .map(|r| spec.row(r).iter().sum::<f64>() / spec.n_time as f64)
        .collect();
    let mean_row: Vec<f64> = (0..spec.n_time)
        .map(|c| spec.column(c).iter().sum::<f64>() / spec.n_freq as f64)
        .collect();
    let mut out = lpc(&mean_column, order_cols)?;
    out.extend(lpc(&mean_row, order_rows)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_signal_falls_back_to_zeros() {
        assert_eq!(lpc(&[3.0; 65], 50).unwrap(), vec![0.0; 50]);
        assert_eq!(lpc_least_squares(&[3.0; 20], 4).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn order_must_fit_signal() {
        assert!(lpc(&[1.0, 2.0, 3.0], 3).is_err());
        assert!(lpc(&[1.0, 2.0, 3.0], 0).is_err());
    }

    #[test]
    fn levinson_matches_dense_solve() {
        let sig: Vec<f64> = (0..65).map(|i| ((i * i) % 13) as f64 + (i as f64 * 0.3).sin()).collect();
        for order in [1, 2, 5, 12] {
            let a = lpc(&sig, order).unwrap();
            let b = lpc_least_squares(&sig, order).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()), "order {order}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn feature_count() {
        let spec = Spectrogram::from_rows(&vec![(0..65).map(|i| (i % 7) as f64).collect(); 65]).unwrap();
        assert_eq!(lpc_features(&spec, 50, 50).unwrap().len(), 100);
    }
}
