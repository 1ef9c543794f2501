mod common;

use common::*;
use mdsig_core::dsp::{convex_hull, isodata_threshold, polygon_area, resize_spectrogram, stft_spectrogram, Spectrogram};
use mdsig_core::features::{dct2_orthonormal, lpc, lpc_least_squares};
use mdsig_core::learn::{fit_pca, mrmr_select, mutual_information, quantize, smote, Dataset, MI_BINS};
use mdsig_core::sim::IqSeries;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_iq(n: usize, rate: f64, seed: u64) -> IqSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            Complex64::from_polar(2.0, 2.0 * std::f64::consts::PI * 37.0 * t)
                + Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
        .collect();
    IqSeries::new(samples, rate).unwrap()
}

#[test]
fn stft_matches_direct_dft() {
    for (seed, window, overlap) in [(1, 64, 0.5), (2, 32, 0.75), (3, 50, 0.0)] {
        let iq = random_iq(700, 400.0, seed);
        let spec = stft_spectrogram(&iq, window, overlap).unwrap();
        let hop = ((window as f64) * (1.0 - overlap)).round() as usize;
        let reference = dft_spectrogram(&iq.samples, window, hop);
        assert_eq!(spec.n_freq, window);
        assert_eq!(spec.n_time, reference[0].len());
        let scale = reference.iter().flatten().cloned().fold(0.0, f64::max);
        for (r, line) in reference.iter().enumerate() {
            let expected_hz = (r as f64 - (window / 2) as f64) * 400.0 / window as f64;
            assert!((spec.freq_axis[r] - expected_hz).abs() < 1e-9);
            for (t, &v) in line.iter().enumerate() {
                assert!(rel_close(spec.get(r, t), v, scale, 1e-9), "row {r} frame {t}: {} vs {v}", spec.get(r, t));
            }
        }
    }
}

#[test]
fn dct_matches_quadruple_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (rows, cols) in [(8, 8), (8, 8), (5, 7), (1, 4)] {
        let img: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(-3.0..3.0)).collect();
        let fast = dct2_orthonormal(&img, rows, cols).unwrap();
        let slow = dct2_brute(&img, rows, cols);
        let scale = slow.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (a, b) in fast.iter().zip(&slow) {
            assert!(rel_close(*a, *b, scale, 1e-9), "{a} vs {b}");
        }
    }
}

#[test]
fn isodata_lands_within_one_level_of_a_swept_fixed_point() {
    for seed in 0..20 {
        let values = bimodal_image(40, 50, seed);
        let rows: Vec<Vec<f64>> = values.chunks(50).map(<[f64]>::to_vec).collect();
        let spec = Spectrogram::from_rows(&rows).unwrap();
        let (t, out) = isodata_threshold(&spec).unwrap();
        let (fixed, step) = isodata_fixed_levels(&values);
        assert!(!fixed.is_empty(), "image {seed} has no fixed level");
        let nearest = fixed.iter().map(|f| (f - t).abs()).fold(f64::INFINITY, f64::min);
        assert!(nearest <= step, "image {seed}: threshold {t} is {nearest} from the sweep (step {step})");
        for (v, o) in values.iter().zip(&out.values) {
            assert_eq!(*o, if *v < t { 0.0 } else { *v });
        }
    }
}

#[test]
fn hull_matches_gift_wrapping() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..30 {
        let n = 3 + case * 2;
        let mut pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]).collect();
        if case % 3 == 0 {
            // integer grid points put collinear triples on the hull
            pts.iter_mut().for_each(|p| *p = [p[0].round(), p[1].round()]);
        }
        let mut fast = convex_hull(&pts);
        let mut slow = gift_wrap(&pts);
        assert!((polygon_area(&fast) - shoelace(&slow)).abs() < 1e-9);
        let key = |a: &[f64; 2], b: &[f64; 2]| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]));
        fast.sort_by(key);
        slow.sort_by(key);
        assert_eq!(fast, slow, "case {case}");
    }
}

fn mrmr_fixture(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 60;
    let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
    let rows = labels
        .iter()
        .map(|&y| {
            let base = y as f64;
            let a = base + rng.random_range(-0.8..0.8);
            vec![
                a,
                a + rng.random_range(-0.1..0.1),
                base * base + rng.random_range(-2.0..2.0),
                rng.random_range(0.0..1.0),
                -base + rng.random_range(-1.5..1.5),
                rng.random_range(0.0f64..4.0).floor(),
                rng.random_range(-1.0..1.0) * (1.0 + base),
                a * 0.5 + rng.random_range(-0.3..0.3),
            ]
        })
        .collect();
    Dataset::from_matrix(rows, labels, 3).unwrap()
}

#[test]
fn mrmr_matches_greedy_recount() {
    for seed in 0..5 {
        let data = mrmr_fixture(seed);
        let labels = data.labels();
        let columns: Vec<Vec<usize>> = (0..8).map(|f| rank_bins(&data.column(f), MI_BINS)).collect();
        for (f, col) in columns.iter().enumerate() {
            let q: Vec<usize> = quantize(&data.column(f), MI_BINS).into_iter().map(usize::from).collect();
            assert_eq!(&q, col);
            let yq: Vec<u8> = labels.iter().map(|&l| l as u8).collect();
            let fast = mutual_information(&quantize(&data.column(f), MI_BINS), MI_BINS, &yq, 3);
            assert!(rel_close(fast, mi_counts(col, &labels), 1.0, 1e-9));
        }
        let selected = mrmr_select(&data, 8).unwrap();
        // every pick is optimal for the prefix before it
        for i in 0..selected.len() {
            let scores = mrmr_scores(&columns, &labels, &selected[..i]);
            let best = scores.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
            let got = scores[selected[i]].unwrap();
            assert!(rel_close(got, best, 1.0, 1e-9), "seed {seed} step {i}: {got} vs best {best}");
        }
        assert_eq!(selected, greedy_mrmr(&columns, &labels, 8), "seed {seed}");
    }
}

#[test]
fn bilinear_resize_reproduces_a_bilinear_surface() {
    let f = bilinear_plane(40.0, 0.25, -0.7, 0.03);
    for (rows, cols, out_r, out_c) in [(20, 30, 65, 65), (128, 9, 65, 65), (4, 4, 7, 3)] {
        let src: Vec<Vec<f64>> = (0..rows).map(|r| (0..cols).map(|c| f(r as f64, c as f64)).collect()).collect();
        let spec = Spectrogram::from_rows(&src).unwrap();
        let out = resize_spectrogram(&spec, out_r, out_c).unwrap();
        assert_eq!((out.n_freq, out.n_time), (out_r, out_c));
        for i in 0..out_r {
            for j in 0..out_c {
                let x = i as f64 * (rows - 1) as f64 / (out_r - 1) as f64;
                let y = j as f64 * (cols - 1) as f64 / (out_c - 1) as f64;
                assert!(rel_close(out.get(i, j), f(x, y), 1.0, 1e-9));
            }
        }
    }
}

#[test]
fn lpc_recovers_ar2_and_agrees_with_dense_solve() {
    let truth = [0.75, -0.5];
    for seed in 0..3 {
        let s = ar_series(&truth, 20_000, seed);
        let a = lpc(&s, 2).unwrap();
        for (got, want) in a.iter().zip(truth) {
            assert!((got - want).abs() <= 0.05, "seed {seed}: {a:?}");
        }
        let order = 12;
        let fast = lpc(&s[..2000], order).unwrap();
        let dense = lpc_least_squares(&s[..2000], order).unwrap();
        for (x, y) in fast.iter().zip(&dense) {
            assert!(rel_close(*x, *y, 1.0, 1e-9));
        }
    }
}

#[test]
fn pca_matches_closed_form_on_two_features() {
    let pts = [[2.0, 1.0], [0.0, -1.0], [3.0, 2.5], [-1.0, -2.0], [1.0, 0.5], [4.0, 2.0]];
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    let a = pts.iter().map(|p| (p[0] - mx).powi(2)).sum::<f64>() / (n - 1.0);
    let c = pts.iter().map(|p| (p[1] - my).powi(2)).sum::<f64>() / (n - 1.0);
    let b = pts.iter().map(|p| (p[0] - mx) * (p[1] - my)).sum::<f64>() / (n - 1.0);
    let disc = (((a - c) / 2.0).powi(2) + b * b).sqrt();
    let (l1, l2) = ((a + c) / 2.0 + disc, (a + c) / 2.0 - disc);
    // eigenvector of l1: (b, l1 − a)
    let norm = (b * b + (l1 - a).powi(2)).sqrt();
    let mut v1 = [b / norm, (l1 - a) / norm];
    let lead = if v1[0].abs() >= v1[1].abs() { v1[0] } else { v1[1] };
    if lead < 0.0 {
        v1 = [-v1[0], -v1[1]];
    }

    let rows: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
    let fit = fit_pca(&rows, 2).unwrap();
    assert!(rel_close(fit.eigenvalues[0], l1, 1.0, 1e-9));
    assert!(rel_close(fit.eigenvalues[1], l2, 1.0, 1e-9));
    assert!(rel_close(fit.total_variance, a + c, 1.0, 1e-9));
    assert!(rel_close(fit.components[0][0], v1[0], 1.0, 1e-9));
    assert!(rel_close(fit.components[0][1], v1[1], 1.0, 1e-9));
    let dot = fit.components[0][0] * fit.components[1][0] + fit.components[0][1] * fit.components[1][1];
    assert!(dot.abs() < 1e-12);
}

fn inside_or_on(hull: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = hull.len();
    (0..n).all(|i| {
        let (a, b) = (hull[i], hull[(i + 1) % n]);
        (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= -1e-9
    })
}

#[test]
fn smote_points_lie_on_same_class_segments() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (class, count) in [(0usize, 30usize), (1, 9), (2, 5)] {
        for _ in 0..count {
            let c = class as f64 * 4.0;
            rows.push(vec![c + rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0) - c]);
            labels.push(class);
        }
    }
    let data = Dataset::from_matrix(rows, labels, 3).unwrap();
    let out = smote(&data, 5, 17).unwrap();
    assert_eq!(out.class_counts(), vec![30, 30, 30]);
    for s in &out.samples[data.n_samples()..] {
        let members: Vec<[f64; 2]> =
            data.samples.iter().filter(|m| m.label == s.label).map(|m| [m.values[0], m.values[1]]).collect();
        let p = [s.values[0], s.values[1]];
        assert!(inside_or_on(&gift_wrap(&members), p), "{p:?} outside class {} hull", s.label);
        let on_segment = members.iter().any(|a| {
            members.iter().any(|b| {
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len2 = dx * dx + dy * dy;
                if len2 == 0.0 {
                    return false;
                }
                let u = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2;
                let off = ((p[0] - a[0] - u * dx).powi(2) + (p[1] - a[1] - u * dy).powi(2)).sqrt();
                (-1e-12..=1.0 + 1e-12).contains(&u) && off < 1e-9
            })
        });
        assert!(on_segment, "{p:?} is not between two class-{} samples", s.label);
    }
}
