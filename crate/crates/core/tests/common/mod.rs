//! Brute-force reference implementations shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Hann-windowed power spectrogram by the defining double sum, rows ordered
/// from −fs/2 upward. `out[row][frame]`.
pub fn dft_spectrogram(x: &[Complex64], window: usize, hop: usize) -> Vec<Vec<f64>> {
    let frames = (x.len() - window) / hop + 1;
    let w: Vec<f64> = (0..window).map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / window as f64).cos()).collect();
    let mut out = vec![vec![0.0; frames]; window];
    for t in 0..frames {
        for (row, line) in out.iter_mut().enumerate() {
            let k = row as i64 - (window / 2) as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..window {
                let ang = -2.0 * PI * k as f64 * n as f64 / window as f64;
                acc += x[t * hop + n] * w[n] * Complex64::from_polar(1.0, ang);
            }
            line[t] = acc.norm_sqr();
        }
    }
    out
}

/// Orthonormal 2-D DCT-II, one output coefficient per quadruple-loop pass.
pub fn dct2_brute(img: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for u in 0..rows {
        for v in 0..cols {
            let au = if u == 0 { (1.0 / rows as f64).sqrt() } else { (2.0 / rows as f64).sqrt() };
            let av = if v == 0 { (1.0 / cols as f64).sqrt() } else { (2.0 / cols as f64).sqrt() };
            let mut s = 0.0;
            for m in 0..rows {
                for n in 0..cols {
                    s += img[m * cols + n]
                        * (PI * (2 * m + 1) as f64 * u as f64 / (2 * rows) as f64).cos()
                        * (PI * (2 * n + 1) as f64 * v as f64 / (2 * cols) as f64).cos();
                }
            }
            out[u * cols + v] = au * av * s;
        }
    }
    out
}

/// Thresholds at the 256 quantization levels of `[min, max]` that the
/// intermeans update maps back onto their own level.
pub fn isodata_fixed_levels(values: &[f64]) -> (Vec<f64>, f64) {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let step = (max - min) / 255.0;
    let mut fixed = Vec::new();
    for level in 0..256 {
        let t = min + level as f64 * step;
        let below: Vec<f64> = values.iter().cloned().filter(|&v| v < t).collect();
        let above: Vec<f64> = values.iter().cloned().filter(|&v| v >= t).collect();
        if below.is_empty() || above.is_empty() {
            continue;
        }
        let mid = (below.iter().sum::<f64>() / below.len() as f64 + above.iter().sum::<f64>() / above.len() as f64) / 2.0;
        if ((mid - min) / step).round() as i64 == level as i64 {
            fixed.push(t);
        }
    }
    (fixed, step)
}

/// Two Gaussian-ish populations on a `rows × cols` grid.
pub fn bimodal_image(rows: usize, cols: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = rng.random_range(0.5..2.0);
    let hi = lo + rng.random_range(5.0..20.0);
    let frac = rng.random_range(0.1..0.4);
    (0..rows * cols)
        .map(|_| {
            let centre = if rng.random::<f64>() < frac { hi } else { lo };
            let noise: f64 = (0..4).map(|_| rng.random::<f64>() - 0.5).sum();
            (centre + noise).max(0.0)
        })
        .collect()
}

/// Jarvis march; counter-clockwise from the lowest-leftmost point, collinear
/// points skipped.
pub fn gift_wrap(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let dist = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    let start = pts[0];
    let mut hull = vec![start];
    let mut current = start;
    loop {
        let mut next = if pts[0] == current { pts[1] } else { pts[0] };
        for &p in &pts {
            if p == current {
                continue;
            }
            let c = cross(current, next, p);
            if c < 0.0 || (c == 0.0 && dist(current, p) > dist(current, next)) {
                next = p;
            }
        }
        if next == start {
            break;
        }
        hull.push(next);
        current = next;
        if hull.len() > pts.len() {
            panic!("gift wrapping did not close");
        }
    }
    hull
}

pub fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1]).sum::<f64>().abs() / 2.0
}

/// Equal-frequency bins by direct counting: `floor(bins · #{v < x} / n)`.
pub fn rank_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    values.iter().map(|&x| bins * values.iter().filter(|&&v| v < x).count() / n).collect()
}

/// Plug-in mutual information from a table of joint counts, nats.
pub fn mi_counts(x: &[usize], y: &[usize]) -> f64 {
    let n = x.len() as f64;
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut px: BTreeMap<usize, f64> = BTreeMap::new();
    let mut py: BTreeMap<usize, f64> = BTreeMap::new();
    for (&a, &b) in x.iter().zip(y) {
        *joint.entry((a, b)).or_default() += 1.0;
        *px.entry(a).or_default() += 1.0;
        *py.entry(b).or_default() += 1.0;
    }
    joint.iter().map(|(&(a, b), &c)| c / n * (c * n / (px[&a] * py[&b])).ln()).sum()
}

/// mRMR scores of every candidate given an already-chosen prefix.
pub fn mrmr_scores(columns: &[Vec<usize>], labels: &[usize], prefix: &[usize]) -> Vec<Option<f64>> {
    (0..columns.len())
        .map(|f| {
            if prefix.contains(&f) {
                return None;
            }
            let rel = mi_counts(&columns[f], labels);
            if prefix.is_empty() {
                return Some(rel);
            }
            let red: f64 = prefix.iter().map(|&s| mi_counts(&columns[f], &columns[s])).sum::<f64>() / prefix.len() as f64;
            Some(rel - red)
        })
        .collect()
}

/// Greedy mRMR recomputed from scratch at every step.
pub fn greedy_mrmr(columns: &[Vec<usize>], labels: &[usize], k: usize) -> Vec<usize> {
    let mut chosen = Vec::new();
    while chosen.len() < k {
        let scores = mrmr_scores(columns, labels, &chosen);
        let mut best: Option<(usize, f64)> = None;
        for (f, s) in scores.iter().enumerate() {
            if let Some(s) = *s {
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((f, s));
                }
            }
        }
        chosen.push(best.unwrap().0);
    }
    chosen
}

/// The surface `a + b·r + c·col + d·r·col`, which bilinear interpolation reproduces exactly.
pub fn bilinear_plane(a: f64, b: f64, c: f64, d: f64) -> impl Fn(f64, f64) -> f64 {
    move |r, col| a + b * r + c * col + d * r * col
}

/// AR(p) series `s[n] = Σ a_k s[n−k] + e[n]` with unit Gaussian drive.
pub fn ar_series(coeffs: &[f64], n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let burn = 500;
    let mut s = vec![0.0; n + burn];
    for i in 0..n + burn {
        let e: f64 = StandardNormal.sample(&mut rng);
        let mut v = e;
        for (k, a) in coeffs.iter().enumerate() {
            if i > k {
                v += a * s[i - k - 1];
            }
        }
        s[i] = v;
    }
    s.split_off(burn)
}

/// `|a − b| ≤ tol · max(|a|, |b|, scale)`; `scale` guards entries that are
/// tiny next to the rest of their array.
pub fn rel_close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(scale)
}
