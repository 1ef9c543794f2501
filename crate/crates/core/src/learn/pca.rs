//! Principal component analysis by eigendecomposition.
//!
//! The covariance (divisor n − 1) is decomposed directly when there are no
//! more features than samples; otherwise the n × n Gram matrix is used and its
//! eigenvectors are mapped back to feature space. Components with eigenvalues
//! below `1e-10 · λ_max · max(n, d)` are dropped and reported via `rank`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    pub mean: Vec<f64>,
    /// Unit-norm loadings, decreasing eigenvalue; largest-magnitude loading positive.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub total_variance: f64,
    pub requested: usize,
}

impl Pca {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// True when fewer components than requested carry variance.
    pub fn truncated(&self) -> bool {
        self.components.len() < self.requested
    }

    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .map(|l| if self.total_variance > 0.0 { l / self.total_variance } else { 0.0 })
            .collect()
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.iter().zip(x).zip(&self.mean).map(|((w, v), m)| w * (v - m)).sum())
            .collect()
    }

    pub fn transform_all<R: AsRef<[f64]>>(&self, rows: &[R]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform(r.as_ref())).collect()
    }

    pub fn reconstruct(&self, z: &[f64]) -> Vec<f64> {
        let mut x = self.mean.clone();
        for (c, &s) in self.components.iter().zip(z) {
            for (xi, ci) in x.iter_mut().zip(c) {
                *xi += s * ci;
            }
        }
        x
    }
}

pub fn fit_pca<R: AsRef<[f64]>>(rows: &[R], n_components: usize) -> Result<Pca> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::InsufficientData("PCA needs at least 2 samples".into()));
    }
    let d = rows[0].as_ref().len();
    if rows.iter().any(|r| r.as_ref().len() != d) {
        return Err(Error::shape("ragged rows"));
    }
    if n_components == 0 || n_components > n.min(d) {
        return Err(Error::domain(format!("{n_components} components from {n} samples x {d} features")));
    }
    let mut mean = vec![0.0; d];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r.as_ref()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centered = DMatrix::from_fn(n, d, |i, j| rows[i].as_ref()[j] - mean[j]);
    let denom = (n - 1) as f64;
    let total_variance = centered.iter().map(|v| v * v).sum::<f64>() / denom;

    let use_gram = d > n;
    let small = if use_gram {
        &centered * centered.transpose() / denom
    } else {
        centered.transpose() * &centered / denom
    };
    let eig = SymmetricEigen::new(small);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let lambda_max = eig.eigenvalues[order[0]].max(0.0);
    let tol = 1e-10 * lambda_max * n.max(d) as f64;

    let mut components = Vec::new();
    let mut eigenvalues = Vec::new();
    for &idx in order.iter().take(n_components) {
        let lambda = eig.eigenvalues[idx];
        if !(lambda > tol) {
            break;
        }
        let u = eig.eigenvectors.column(idx);
        let mut v: Vec<f64> = if use_gram {
            let w = centered.transpose() * u;
            let norm = w.norm();
            w.iter().map(|x| x / norm).collect()
        } else {
            u.iter().copied().collect()
        };
        let pivot = (0..d).fold(0, |best, j| if v[j].abs() > v[best].abs() { j } else { best });
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components.push(v);
        eigenvalues.push(lambda);
    }
    Ok(Pca { mean, components, eigenvalues, total_variance, requested: n_components })
}

/// PCA of a dataset's feature rows; returns the fit and the projected rows.
pub fn pca(data: &Dataset, n_components: usize) -> Result<(Pca, Vec<Vec<f64>>)> {
    let rows = data.rows();
    let fit = fit_pca(&rows, n_components)?;
    let projected = fit.transform_all(&rows);
    Ok((fit, projected))
}
