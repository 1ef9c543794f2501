//! C-SVC with an RBF kernel, trained by SMO using second-order working set
//! selection, combined one-vs-one for multiclass problems.

use crate::codec::{ByteReader, ByteWriter};
use crate::error::{Error, Result};

use super::scale::Standardizer;

const TAU: f64 = 1e-12;
const EPS: f64 = 1e-3;

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// Dual solution for one binary problem: `f(x) = Σ coef_i K(sv_i, x) − rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySvm {
    pub support: Vec<usize>,
    pub coef: Vec<f64>,
    pub rho: f64,
}

/// Solves the binary dual on precomputed kernel `k` (row-major n × n) with
/// labels in {+1, −1}.
pub fn smo(k: &[f64], y: &[f64], c: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let n = y.len();
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;

    for _ in 0..max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            let in_up = if y[t] > 0.0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
            if in_up && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                i_sel = t;
            }
        }
        if i_sel == usize::MAX {
            break;
        }
        let i = i_sel;
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            let in_low = if y[t] > 0.0 { !lower(alpha[t]) } else { !upper(alpha[t]) };
            if !in_low {
                continue;
            }
            let yg = y[t] * grad[t];
            gmax2 = gmax2.max(yg);
            let b = gmax + yg;
            if b > 0.0 {
                let mut a = k[i * n + i] + k[t * n + t] - 2.0 * k[i * n + t];
                if a <= 0.0 {
                    a = TAU;
                }
                let obj = -b * b / a;
                if obj <= best_obj {
                    best_obj = obj;
                    j_sel = t;
                }
            }
        }
        if gmax + gmax2 < EPS || j_sel == usize::MAX {
            break;
        }
        let j = j_sel;
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(i, t) * di + q(j, t) * dj;
        }
    }

    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut n_free, mut sum_free) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 { sum_free / n_free as f64 } else { (ub + lb) / 2.0 };
    (alpha, rho)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub scaler: Standardizer,
    pub gamma: f64,
    pub c: f64,
    pub n_classes: usize,
    /// Standardized training rows; support indices point here.
    pub vectors: Vec<Vec<f64>>,
    /// One machine per pair `(a, b)`, `a < b`, in lexicographic order; positive means `a`.
    pub machines: Vec<BinarySvm>,
}

impl SvmModel {
    pub fn fit(x: &[&[f64]], y: &[usize], n_classes: usize, c: f64, gamma: Option<f64>) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::domain("SVM C must be positive"));
        }
        let d = x.first().map_or(0, |r| r.len());
        let gamma = gamma.unwrap_or(1.0 / d.max(1) as f64);
        let scaler = Standardizer::fit(x);
        let vectors = scaler.transform_all(x);
        let n = vectors.len();
        let mut kernel = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rbf(&vectors[i], &vectors[j], gamma);
                kernel[i * n + j] = v;
                kernel[j * n + i] = v;
            }
        }
        let mut machines = Vec::new();
        for a in 0..n_classes {
            for b in a + 1..n_classes {
                let idx: Vec<usize> = (0..n).filter(|&i| y[i] == a || y[i] == b).collect();
                let m = idx.len();
                let sub: Vec<f64> = idx.iter().flat_map(|&i| idx.iter().map(move |&j| (i, j))).map(|(i, j)| kernel[i * n + j]).collect();
                let yy: Vec<f64> = idx.iter().map(|&i| if y[i] == a { 1.0 } else { -1.0 }).collect();
                let (alpha, rho) = if yy.iter().all(|&v| v > 0.0) || yy.iter().all(|&v| v < 0.0) {
                    // one side missing: constant decision
                    (vec![0.0; m], if yy.first().is_some_and(|&v| v > 0.0) { -1.0 } else { 1.0 })
                } else {
                    smo(&sub, &yy, c, 10_000_000.max(100 * m))
                };
                let mut support = Vec::new();
                let mut coef = Vec::new();
                for (t, &al) in alpha.iter().enumerate() {
                    if al > 0.0 {
                        support.push(idx[t]);
                        coef.push(al * yy[t]);
                    }
                }
                machines.push(BinarySvm { support, coef, rho });
            }
        }
        Ok(Self { scaler, gamma, c, n_classes, vectors, machines })
    }

    pub fn decision_values(&self, x: &[f64]) -> Vec<f64> {
        let z = self.scaler.transform(x);
        self.machines
            .iter()
            .map(|m| {
                m.support.iter().zip(&m.coef).map(|(&s, &w)| w * rbf(&self.vectors[s], &z, self.gamma)).sum::<f64>() - m.rho
            })
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let dec = self.decision_values(x);
        let mut votes = vec![0.0; self.n_classes];
        let mut p = 0;
        for a in 0..self.n_classes {
            for b in a + 1..self.n_classes {
                if dec[p] > 0.0 { votes[a] += 1.0 } else { votes[b] += 1.0 }
                p += 1;
            }
        }
        super::argmax_lowest(&votes)
    }

    pub(crate) fn encode(&self, w: &mut ByteWriter) {
        self.scaler.encode(w);
        w.f64(self.gamma);
        w.f64(self.c);
        w.u64(self.n_classes as u64);
        w.len_prefix(self.vectors.len());
        for v in &self.vectors {
            w.f64s(v);
        }
        w.len_prefix(self.machines.len());
        for m in &self.machines {
            w.usizes(&m.support);
            w.f64s(&m.coef);
            w.f64(m.rho);
        }
    }

    pub(crate) fn decode(r: &mut ByteReader) -> Result<Self> {
        let scaler = Standardizer::decode(r)?;
        let gamma = r.f64()?;
        let c = r.f64()?;
        let n_classes = r.u64()? as usize;
        let nv = r.len_prefix()?;
        let vectors = (0..nv).map(|_| r.f64s()).collect::<Result<Vec<_>>>()?;
        let nm = r.len_prefix()?;
        let mut machines = Vec::with_capacity(nm);
        for _ in 0..nm {
            machines.push(BinarySvm { support: r.usizes()?, coef: r.f64s()?, rho: r.f64()? });
        }
        if machines.iter().flat_map(|m| &m.support).any(|&s| s >= vectors.len()) {
            return Err(Error::Format("support index out of range".into()));
        }
        Ok(Self { scaler, gamma, c, n_classes, vectors, machines })
    }
}
