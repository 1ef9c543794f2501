//! k-nearest-neighbour voting on z-scored features.

use crate::codec::{ByteReader, ByteWriter};
use crate::error::{Error, Result};

use super::scale::Standardizer;

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub k: usize,
    pub n_classes: usize,
    pub scaler: Standardizer,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl KnnModel {
    pub fn fit(x: &[&[f64]], y: &[usize], n_classes: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("kNN needs k >= 1"));
        }
        let scaler = Standardizer::fit(x);
        Ok(Self { k, n_classes, rows: scaler.transform_all(x), scaler, labels: y.to_vec() })
    }

    /// Majority vote; ties go to the tied class with the closest member.
    pub fn predict(&self, x: &[f64]) -> usize {
        let z = self.scaler.transform(x);
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let k = self.k.min(dist.len());
        let mut votes = vec![0usize; self.n_classes];
        for &(_, i) in &dist[..k] {
            votes[self.labels[i]] += 1;
        }
        let top = votes.iter().copied().max().unwrap_or(0);
        dist[..k].iter().map(|&(_, i)| self.labels[i]).find(|&c| votes[c] == top).unwrap_or(0)
    }

    pub(crate) fn encode(&self, w: &mut ByteWriter) {
        w.u64(self.k as u64);
        w.u64(self.n_classes as u64);
        self.scaler.encode(w);
        w.len_prefix(self.rows.len());
        for r in &self.rows {
            w.f64s(r);
        }
        w.usizes(&self.labels);
    }

    pub(crate) fn decode(r: &mut ByteReader) -> Result<Self> {
        let k = r.u64()? as usize;
        let n_classes = r.u64()? as usize;
        let scaler = Standardizer::decode(r)?;
        let n = r.len_prefix()?;
        let rows = (0..n).map(|_| r.f64s()).collect::<Result<Vec<_>>>()?;
        let labels = r.usizes()?;
        if labels.len() != rows.len() || labels.iter().any(|&l| l >= n_classes) {
            return Err(Error::Format("kNN labels inconsistent".into()));
        }
        Ok(Self { k, n_classes, scaler, rows, labels })
    }
}
