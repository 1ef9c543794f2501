//! Boosted ensemble of ridge LDA learners on random feature subspaces.
//!
//! Each round draws `min(d, ⌈d/2⌉, 50)` features, fits a weighted LDA with a
//! small ridge on the pooled covariance, and is weighted by the multiclass
//! AdaBoost (SAMME) rule. Rounds whose weighted error is no better than
//! chance are discarded.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::codec::{ByteReader, ByteWriter};
use crate::error::{Error, Result};

use super::scale::Standardizer;

pub const DEFAULT_ROUNDS: usize = 30;
pub const MAX_SUBSPACE: usize = 50;
const RIDGE: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct LdaLearner {
    pub features: Vec<usize>,
    /// Per class: linear weights over `features` then the bias.
    pub discriminants: Vec<Vec<f64>>,
}

impl LdaLearner {
    fn fit(z: &[Vec<f64>], y: &[usize], w: &[f64], n_classes: usize, features: Vec<usize>) -> Self {
        let p = features.len();
        let mut class_w = vec![0.0; n_classes];
        let mut means = vec![vec![0.0; p]; n_classes];
        for ((row, &c), &wi) in z.iter().zip(y).zip(w) {
            class_w[c] += wi;
            for (m, &f) in means[c].iter_mut().zip(&features) {
                *m += wi * row[f];
            }
        }
        for (m, &cw) in means.iter_mut().zip(&class_w) {
            if cw > 0.0 {
                m.iter_mut().for_each(|v| *v /= cw);
            }
        }
        let total: f64 = class_w.iter().sum();
        let mut cov = DMatrix::<f64>::zeros(p, p);
        for ((row, &c), &wi) in z.iter().zip(y).zip(w) {
            let dv = DVector::from_iterator(p, features.iter().zip(&means[c]).map(|(&f, m)| row[f] - m));
            cov += wi * &dv * dv.transpose();
        }
        cov /= total;
        let ridge = RIDGE * (cov.trace() / p as f64).max(1e-12);
        for i in 0..p {
            cov[(i, i)] += ridge;
        }
        let chol = cov.cholesky().expect("ridge covariance is positive definite");
        let discriminants = (0..n_classes)
            .map(|c| {
                if class_w[c] <= 0.0 {
                    let mut d = vec![0.0; p];
                    d.push(f64::NEG_INFINITY);
                    return d;
                }
                let mu = DVector::from_column_slice(&means[c]);
                let a = chol.solve(&mu);
                let bias = -0.5 * mu.dot(&a) + (class_w[c] / total).ln();
                let mut d: Vec<f64> = a.iter().copied().collect();
                d.push(bias);
                d
            })
            .collect();
        Self { features, discriminants }
    }

    fn predict(&self, z: &[f64]) -> usize {
        let scores: Vec<f64> = self
            .discriminants
            .iter()
            .map(|d| {
                let p = self.features.len();
                d[..p].iter().zip(&self.features).map(|(a, &f)| a * z[f]).sum::<f64>() + d[p]
            })
            .collect();
        super::argmax_lowest(&scores)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdaEnsemble {
    pub scaler: Standardizer,
    pub n_classes: usize,
    pub learners: Vec<LdaLearner>,
    pub alphas: Vec<f64>,
}

impl LdaEnsemble {
    pub fn fit(x: &[&[f64]], y: &[usize], n_classes: usize, rounds: usize, seed: u64) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::domain("LDA ensemble needs at least one round"));
        }
        let n = x.len();
        let d = x.first().map_or(0, |r| r.len());
        let scaler = Standardizer::fit(x);
        let z = scaler.transform_all(x);
        let sub = d.min(d.div_ceil(2)).clamp(1, MAX_SUBSPACE);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = vec![1.0 / n as f64; n];
        let mut learners = Vec::new();
        let mut alphas = Vec::new();
        let k = n_classes as f64;
        let mut fallback: Option<(f64, LdaLearner)> = None;
        for _ in 0..rounds {
            let mut features = sample_indices(&mut rng, d, sub).into_vec();
            features.sort_unstable();
            let learner = LdaLearner::fit(&z, y, &w, n_classes, features);
            let miss: Vec<bool> = z.iter().zip(y).map(|(r, &c)| learner.predict(r) != c).collect();
            let err: f64 = w.iter().zip(&miss).filter(|(_, &m)| m).map(|(wi, _)| wi).sum();
            if err >= 1.0 - 1.0 / k {
                // no better than chance under current weights: draw another subspace
                if fallback.as_ref().is_none_or(|(e, _)| err < *e) {
                    fallback = Some((err, learner));
                }
                continue;
            }
            let e = err.max(1e-10);
            let alpha = ((1.0 - e) / e).ln() + (k - 1.0).ln();
            learners.push(learner);
            alphas.push(alpha);
            if err == 0.0 {
                break;
            }
            for (wi, &m) in w.iter_mut().zip(&miss) {
                if m {
                    *wi *= alpha.exp();
                }
            }
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|wi| *wi /= s);
        }
        if learners.is_empty() {
            let (_, learner) = fallback.expect("at least one round ran");
            learners.push(learner);
            alphas.push(1.0);
        }
        Ok(Self { scaler, n_classes, learners, alphas })
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let z = self.scaler.transform(x);
        let mut votes = vec![0.0; self.n_classes];
        for (l, a) in self.learners.iter().zip(&self.alphas) {
            votes[l.predict(&z)] += a;
        }
        super::argmax_lowest(&votes)
    }

    pub(crate) fn encode(&self, w: &mut ByteWriter) {
        self.scaler.encode(w);
        w.u64(self.n_classes as u64);
        w.f64s(&self.alphas);
        w.len_prefix(self.learners.len());
        for l in &self.learners {
            w.usizes(&l.features);
            w.len_prefix(l.discriminants.len());
            for d in &l.discriminants {
                w.f64s(d);
            }
        }
    }

    pub(crate) fn decode(r: &mut ByteReader) -> Result<Self> {
        let scaler = Standardizer::decode(r)?;
        let n_classes = r.u64()? as usize;
        let alphas = r.f64s()?;
        let n = r.len_prefix()?;
        let mut learners = Vec::with_capacity(n);
        for _ in 0..n {
            let features = r.usizes()?;
            let nd = r.len_prefix()?;
            let discriminants = (0..nd).map(|_| r.f64s()).collect::<Result<Vec<_>>>()?;
            if discriminants.iter().any(|d| d.len() != features.len() + 1) {
                return Err(Error::Format("LDA discriminant length mismatch".into()));
            }
            learners.push(LdaLearner { features, discriminants });
        }
        if alphas.len() != learners.len() {
            return Err(Error::Format("LDA weight count mismatch".into()));
        }
        Ok(Self { scaler, n_classes, learners, alphas })
    }
}
