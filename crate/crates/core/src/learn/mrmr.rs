//! Minimum-redundancy maximum-relevance feature selection.
//!
//! Features are discretised into 8 equal-frequency bins; mutual information
//! uses plug-in probabilities with natural logarithms. The greedy step picks
//! the feature maximising `I(f; y) − mean_{s ∈ S} I(f; s)`, lowest index on ties.

use rayon::prelude::*;

use super::Dataset;
use crate::error::{Error, Result};

pub const MI_BINS: usize = 8;

/// Equal-frequency bin of each value: `floor(bins · #{v < x} / n)`.
/// Tied values always share a bin.
pub fn quantize(values: &[f64], bins: usize) -> Vec<u8> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0u8; n];
    let mut less = 0;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && values[order[pos - 1]] != values[i] {
            less = pos;
        }
        out[i] = (bins * less / n) as u8;
    }
    out
}

/// Plug-in mutual information between two discrete sequences, nats.
pub fn mutual_information(x: &[u8], nx: usize, y: &[u8], ny: usize) -> f64 {
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    let mut joint = vec![0usize; nx * ny];
    let mut px = vec![0usize; nx];
    let mut py = vec![0usize; ny];
    for (&a, &b) in x.iter().zip(y) {
        joint[a as usize * ny + b as usize] += 1;
        px[a as usize] += 1;
        py[b as usize] += 1;
    }
    let n = n as f64;
    let mut mi = 0.0;
    for a in 0..nx {
        for b in 0..ny {
            let c = joint[a * ny + b];
            if c > 0 {
                let c = c as f64;
                mi += c / n * (c * n / (px[a] as f64 * py[b] as f64)).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Greedy mRMR ordering of `k` feature indices.
pub fn mrmr_select(data: &Dataset, k: usize) -> Result<Vec<usize>> {
    let d = data.n_features();
    if k == 0 || k > d {
        return Err(Error::domain(format!("cannot select {k} of {d} features")));
    }
    if data.n_samples() == 0 {
        return Err(Error::InsufficientData("mRMR on an empty dataset".into()));
    }
    let n_classes = data.n_classes();
    if n_classes > u8::MAX as usize + 1 {
        return Err(Error::domain("too many classes for mutual-information labels"));
    }
    let labels: Vec<u8> = data.samples.iter().map(|s| s.label as u8).collect();
    let quantized: Vec<Vec<u8>> = (0..d).into_par_iter().map(|f| quantize(&data.column(f), MI_BINS)).collect();
    let relevance: Vec<f64> = quantized
        .par_iter()
        .map(|q| mutual_information(q, MI_BINS, &labels, n_classes))
        .collect();

    let mut selected = Vec::with_capacity(k);
    let mut chosen = vec![false; d];
    let mut redundancy = vec![0.0; d];
    let argmax = |score: &dyn Fn(usize) -> f64, chosen: &[bool]| {
        let mut best: Option<(usize, f64)> = None;
        for f in (0..d).filter(|&f| !chosen[f]) {
            let s = score(f);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((f, s));
            }
        }
        best.map(|(f, _)| f).expect("at least one unchosen feature")
    };

    let first = argmax(&|f| relevance[f], &chosen);
    selected.push(first);
    chosen[first] = true;
    while selected.len() < k {
        let last = &quantized[*selected.last().unwrap()];
        let added: Vec<f64> = (0..d)
            .into_par_iter()
            .map(|f| if chosen[f] { 0.0 } else { mutual_information(&quantized[f], MI_BINS, last, MI_BINS) })
            .collect();
        for (r, a) in redundancy.iter_mut().zip(added) {
            *r += a;
        }
        let m = selected.len() as f64;
        let next = argmax(&|f| relevance[f] - redundancy[f] / m, &chosen);
        selected.push(next);
        chosen[next] = true;
    }
    Ok(selected)
}
