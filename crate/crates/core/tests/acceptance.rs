//! Acceptance gate: runs every criterion, prints one line each and exits
//! nonzero if any fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use mdsig_core::complexity::{beta_bar, power_law_noise, summarize_betas, IwvDiagram};
use mdsig_core::dsp::{isodata_threshold, range_doppler_cube, stft_spectrogram, Spectrogram};
use mdsig_core::features::{
    dct2_orthonormal, extract_features, fwcc, lpc, optimize_filterbank_ga, FeatureFamily, FilterBank, GaParams,
    FEATURES_PER_SENSOR,
};
use mdsig_core::learn::{
    cross_validate, fuse, mrmr_select, probe_with, Dataset, Hyperparams, ModelKind, Protocol, DEFAULT_K_FINAL, MI_BINS,
};
use mdsig_core::pipeline::{
    capture_beta_bar, default_bank, featurize, featurize_index, process_manifest, select_and_evaluate, simulate_capture,
    simulate_corpus, simulate_spectrograms, Manifest, ProcessOptions, RunConfig, Scenario,
};
use mdsig_core::sim::{
    doppler_shift, synthesize_fmcw, synthesize_return, IqSeries, RadarConfig, ScattererTrack, SPEED_OF_LIGHT,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scenario(text: &str) -> Scenario {
    Scenario::from_toml(text).expect("bundled scenario parses")
}

fn doppler_law() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let fs = 4000.0;
    let window = 128;
    let mut worst = 0.0f64;
    for draw in 0..50 {
        let fc = [9.0e9, 24.0e9, 77.0e9][rng.random_range(0..3)];
        let v_max = 0.9 * (fs / 2.0) * SPEED_OF_LIGHT / (2.0 * fc);
        let v: f64 = rng.random_range(-v_max..v_max);
        let radar = RadarConfig::with_carrier(fc, 1.0e9, fs);
        let n = 4000;
        let ranges = (0..n).map(|i| 40.0 - v * i as f64 / fs).collect();
        let track = ScattererTrack::new(ranges, 1.0).map_err(|e| e.to_string())?;
        let iq = synthesize_return(&radar, &[track], n).map_err(|e| e.to_string())?;
        let spec = stft_spectrogram(&iq, window, 0.5).map_err(|e| e.to_string())?;
        let expected = doppler_shift(v, fc);
        let bin = fs / window as f64;
        for (t, row) in spec.ridge().into_iter().enumerate() {
            let off = (spec.freq_axis[row] - expected).abs() / bin;
            worst = worst.max(off);
            ensure(off <= 1.0, || format!("draw {draw} (v={v:.3}, fc={fc:e}) frame {t}: ridge {off:.2} bins off"))?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.1} s"))?;
    Ok(format!("50 draws, worst ridge offset {worst:.2} bins, {secs:.2} s"))
}

fn range_bin_law() -> Outcome {
    for (bw, want) in [(750.0e6, 0.2), (1.5e9, 0.1)] {
        let res = RadarConfig::with_carrier(77.0e9, bw, 3000.0).range_resolution();
        ensure(res == SPEED_OF_LIGHT / (2.0 * bw), || format!("{bw:e} Hz gives {res}"))?;
        ensure((res - want).abs() < 1e-3, || format!("{bw:e} Hz gives {res} m, expected about {want} m"))?;
    }
    let radar = RadarConfig::ti_77ghz();
    let (sps, window) = (16, 32);
    let sweeps = 3000;
    let ranges = (0..sweeps).map(|m| 1.5 - 0.3 * m as f64 / (sweeps - 1) as f64).collect();
    let track = ScattererTrack::new(ranges, 1.0).map_err(|e| e.to_string())?;
    let iq = synthesize_fmcw(&radar, &[track], sweeps, sps).map_err(|e| e.to_string())?;
    let frames = sweeps / window;
    let cube = range_doppler_cube(&iq, &radar, sps, frames, window).map_err(|e| e.to_string())?;
    let first = cube.peak(0).0;
    let last = cube.peak(frames - 1).0;
    let moved = first as i64 - last as i64;
    ensure((1..=2).contains(&moved), || format!("peak moved from bin {first} to {last}"))?;
    Ok(format!("0.2 m and 0.1 m bins; 0.3 m approach moved the peak {moved} bins ({first} -> {last})"))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let samples = (0..1000)
        .map(|_| num_complex::Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let iq = IqSeries::new(samples, 1000.0).map_err(|e| e.to_string())?;
    let spec = stft_spectrogram(&iq, 128, 0.5).map_err(|e| e.to_string())?;
    let reference = dft_spectrogram(&iq.samples, 128, 64);
    let scale = reference.iter().flatten().cloned().fold(0.0, f64::max);
    for (r, line) in reference.iter().enumerate() {
        for (t, &v) in line.iter().enumerate() {
            ensure(rel_close(spec.get(r, t), v, scale, 1e-9), || format!("STFT ({r}, {t}): {} vs {v}", spec.get(r, t)))?;
        }
    }

    for _ in 0..10 {
        let img: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fast = dct2_orthonormal(&img, 8, 8).map_err(|e| e.to_string())?;
        let slow = dct2_brute(&img, 8, 8);
        let scale = slow.iter().map(|v| v.abs()).fold(0.0, f64::max);
        ensure(fast.iter().zip(&slow).all(|(a, b)| rel_close(*a, *b, scale, 1e-9)), || "DCT differs".into())?;
    }

    let truth = [0.75, -0.5];
    let a = lpc(&ar_series(&truth, 20_000, 5), 2).map_err(|e| e.to_string())?;
    ensure(a.iter().zip(truth).all(|(x, y)| (x - y).abs() <= 0.05), || format!("AR(2) recovered as {a:?}"))?;

    let n = 90;
    let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|&y| {
            let base = rng.random_range(-1.0..1.0) + y as f64;
            (0..8).map(|f| base * (f % 3) as f64 + rng.random_range(-1.0..1.0) * (1 + f) as f64).collect()
        })
        .collect();
    let data = Dataset::from_matrix(rows, labels.clone(), 3).map_err(|e| e.to_string())?;
    let columns: Vec<Vec<usize>> = (0..8).map(|f| rank_bins(&data.column(f), MI_BINS)).collect();
    let chosen = mrmr_select(&data, 8).map_err(|e| e.to_string())?;
    let oracle = greedy_mrmr(&columns, &labels, 8);
    for i in 0..8 {
        let scores = mrmr_scores(&columns, &labels, &chosen[..i]);
        let best = scores.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
        let got = scores[chosen[i]].ok_or("mRMR repeated a feature")?;
        ensure(rel_close(got, best, 1.0, 1e-9), || format!("mRMR step {i}: {got} vs {best}"))?;
    }
    ensure(chosen == oracle, || format!("mRMR order {chosen:?} vs greedy recount {oracle:?}"))?;

    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!("STFT, DCT, LPC, mRMR agree with their references, {secs:.2} s"))
}

fn isodata_sweep() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let values = bimodal_image(64, 64, 100 + seed);
        let rows: Vec<Vec<f64>> = values.chunks(64).map(<[f64]>::to_vec).collect();
        let spec = Spectrogram::from_rows(&rows).map_err(|e| e.to_string())?;
        let (t, _) = isodata_threshold(&spec).map_err(|e| e.to_string())?;
        let (fixed, step) = isodata_fixed_levels(&values);
        let nearest = fixed.iter().map(|f| (f - t).abs()).fold(f64::INFINITY, f64::min);
        ensure(nearest <= step, || format!("image {seed}: {:.2} steps from the nearest fixed level", nearest / step))?;
        worst = worst.max(nearest / step);
    }
    Ok(format!("20 images, worst distance {worst:.2} steps"))
}

fn fractal_recovery() -> Outcome {
    let mut parts = Vec::new();
    for beta in [0.5, 1.0, 1.5, 2.0] {
        let mut sum = 0.0;
        for trial in 0..20 {
            let series = power_law_noise(2048, beta, 1000 + trial);
            sum += beta_bar(&IwvDiagram::from_series(&series, 100.0), 64).map_err(|e| e.to_string())?;
        }
        let mean = sum / 20.0;
        ensure((mean - beta).abs() <= 0.1, || format!("beta {beta} recovered as {mean:.3}"))?;
        parts.push(format!("{beta}->{mean:.3}"));
    }

    let mut cfg = RunConfig::default();
    cfg.cube.enabled = true;
    let sc = scenario(include_str!("../../../scenarios/complexity.toml"));
    let sensor = &sc.sensors[0];
    let radar = cfg.sensor(sensor).map_err(|e| e.to_string())?.clone();
    let mut groups = Vec::new();
    for class in 0..sc.classes.len() {
        let betas = (0..sc.samples_per_class)
            .map(|i| {
                let cap = simulate_capture(&cfg, &sc, class, i, sensor)?;
                capture_beta_bar(cap.fmcw.as_ref().expect("cube enabled"), &radar, &cfg)
            })
            .collect::<mdsig_core::Result<Vec<f64>>>()
            .map_err(|e| e.to_string())?;
        let summary = summarize_betas(&betas).map_err(|e| e.to_string())?;
        groups.push((sc.classes[class].name.clone(), summary.mean_beta));
    }
    let (complex, periodic) = (groups[0].1, groups[1].1);
    ensure(complex < periodic, || format!("{groups:?}"))?;
    Ok(format!(
        "{}; {} {complex:.3} < {} {periodic:.3}",
        parts.join(" "),
        groups[0].0,
        groups[1].0
    ))
}

fn feature_count() -> Outcome {
    let cfg = RunConfig::default();
    let mut sc = scenario(include_str!("../../../scenarios/five_class.toml"));
    sc.samples_per_class = 2;
    let bank = default_bank(&cfg).map_err(|e| e.to_string())?;
    let mut per_sensor = BTreeMap::new();
    for sensor in sc.sensors.clone() {
        let set = simulate_spectrograms(&cfg, &sc, &sensor).map_err(|e| e.to_string())?;
        let fv = extract_features(&set.specs[0], &bank, &sensor, &cfg.features).map_err(|e| e.to_string())?;
        let counts = [FeatureFamily::Env, FeatureFamily::Dct, FeatureFamily::Fwcc, FeatureFamily::Lpc].map(|f| fv.family_count(f));
        ensure(fv.len() == 932 && FEATURES_PER_SENSOR == 932, || format!("{sensor}: {} features", fv.len()))?;
        ensure(counts == [7, 500, 325, 100], || format!("{sensor}: family counts {counts:?}"))?;
        per_sensor.extend(featurize(&set, &bank, &cfg).map_err(|e| e.to_string())?);
    }
    let fused = fuse(&per_sensor).map_err(|e| e.to_string())?;
    ensure(fused.n_features() == 2796, || format!("fused width {}", fused.n_features()))?;
    ensure(DEFAULT_K_FINAL == 150 && cfg.learn.k_select == 150, || "default k_final is not 150".into())?;
    Ok("932 = 7 + 500 + 325 + 100 per sensor, fused 2796, k_final 150".into())
}

/// Exponential noise; class 1 carries extra power on three adjacent rows.
fn band_corpus(per_class: usize, seed: u64) -> (Vec<Spectrogram>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut specs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..2 * per_class {
        let class = i % 2;
        let rows: Vec<Vec<f64>> = (0..65)
            .map(|r| {
                (0..65)
                    .map(|_| {
                        let noise = -(1.0 - rng.random::<f64>()).ln();
                        noise + if class == 1 && (46..=48).contains(&r) { 0.6 } else { 0.0 }
                    })
                    .collect()
            })
            .collect();
        specs.push(Spectrogram::from_rows(&rows).expect("non-negative"));
        labels.push(class);
    }
    (specs, labels)
}

fn bank_accuracy(specs: &[Spectrogram], labels: &[usize], bank: &FilterBank, seed: u64) -> mdsig_core::Result<f64> {
    let rows = specs.iter().map(|s| fwcc(s, bank, 5)).collect::<mdsig_core::Result<Vec<_>>>()?;
    let data = Dataset::from_matrix(rows, labels.to_vec(), 2)?;
    let hp = Hyperparams { n_trees: 100, ..Hyperparams::default() };
    Ok(cross_validate(ModelKind::Rfc, &hp, &data, Protocol::Holdout75_25, seed)?.accuracy)
}

fn ga_contract() -> Outcome {
    let start = Instant::now();
    let mut gains = Vec::new();
    for seed in 0..5u64 {
        let (specs, labels) = band_corpus(30, 700 + seed);
        let params = GaParams { population: 12, generations: 8, n_trees: 30, seed, ..GaParams::default() };
        let result = optimize_filterbank_ga(&specs, &labels, 2, &params).map_err(|e| e.to_string())?;
        ensure(result.trace.windows(2).all(|w| w[1] >= w[0]), || format!("seed {seed}: trace {:?}", result.trace))?;
        let (test_specs, test_labels) = band_corpus(40, 800 + seed);
        let random = FilterBank::random(2, 65, &mut ChaCha8Rng::seed_from_u64(900 + seed)).map_err(|e| e.to_string())?;
        let tuned = bank_accuracy(&test_specs, &test_labels, &result.bank, seed).map_err(|e| e.to_string())?;
        let baseline = bank_accuracy(&test_specs, &test_labels, &random, seed).map_err(|e| e.to_string())?;
        gains.push(tuned - baseline);
    }
    let gain = 100.0 * gains.iter().sum::<f64>() / gains.len() as f64;
    let secs = start.elapsed().as_secs_f64();
    ensure(gain >= 5.0, || format!("optimized bank beats random by only {gain:.1} points"))?;
    ensure(secs < 300.0, || format!("took {secs:.0} s"))?;
    Ok(format!("traces non-decreasing, mean gain {gain:.1} points over 5 seeds, {secs:.1} s"))
}

fn sensor_tables(cfg: &RunConfig, sc: &Scenario) -> mdsig_core::Result<BTreeMap<String, Dataset>> {
    let bank = default_bank(cfg)?;
    let mut out = BTreeMap::new();
    for sensor in &sc.sensors {
        out.extend(featurize(&simulate_spectrograms(cfg, sc, sensor)?, &bank, cfg)?);
    }
    Ok(out)
}

fn end_to_end() -> Outcome {
    let cfg = RunConfig::default();
    let five = sensor_tables(&cfg, &scenario(include_str!("../../../scenarios/five_class.toml"))).map_err(|e| e.to_string())?;
    let fused = fuse(&five).map_err(|e| e.to_string())?;
    let acc5 = select_and_evaluate(&fused, DEFAULT_K_FINAL, &cfg.learn, Protocol::Holdout75_25, cfg.seed)
        .map_err(|e| e.to_string())?
        .accuracy;
    ensure(acc5 >= 0.9, || format!("five-class fused accuracy {acc5:.3}"))?;

    let twenty = sensor_tables(&cfg, &scenario(include_str!("../../../scenarios/twenty_class.toml"))).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (sensor, data) in &twenty {
        let chance = 1.0 / data.n_classes() as f64;
        let acc = select_and_evaluate(data, DEFAULT_K_FINAL, &cfg.learn, Protocol::Holdout75_25, cfg.seed)
            .map_err(|e| e.to_string())?
            .accuracy;
        ensure(acc > 5.0 * chance, || format!("twenty-class {sensor} accuracy {acc:.3}"))?;
        parts.push(format!("{sensor} {acc:.3}"));
    }
    Ok(format!("five-class {acc5:.3}; twenty-class {}", parts.join(", ")))
}

fn imitation_probe() -> Outcome {
    let cfg = RunConfig::default();
    let tables = sensor_tables(&cfg, &scenario(include_str!("../../../scenarios/imitation.toml"))).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (sensor, data) in &tables {
        let group = |name: &str| {
            let idx: Vec<usize> = (0..data.n_samples()).filter(|&i| data.samples[i].signer == name).collect();
            data.select_rows(&idx)
        };
        let report = probe_with(&group("native"), &group("imitation"), cfg.learn.probe_components, cfg.seed)
            .map_err(|e| e.to_string())?;
        ensure(
            report.variance_ratio > 1.0 && report.centroid_shift > 0.0 && report.accuracy > 0.9,
            || format!("{sensor}: {report:?}"),
        )?;
        parts.push(format!(
            "{sensor} ratio {:.2} shift {:.2} accuracy {:.3}",
            report.variance_ratio, report.centroid_shift, report.accuracy
        ));
    }
    Ok(parts.join("; "))
}

fn run_once(cfg: &RunConfig, sc: &Scenario, dir: &Path) -> mdsig_core::Result<Vec<(String, Vec<u8>)>> {
    let raw = dir.join("raw");
    let manifest = simulate_corpus(cfg, sc, &raw)?;
    let processed = dir.join("processed");
    let index = process_manifest(cfg, &manifest, &raw, &processed, ProcessOptions::default())?;
    let index = Manifest::from_toml(&index.to_toml())?;
    let (tables, _) = featurize_index(cfg, &index, &processed, &default_bank(cfg)?)?;
    let header = vec![format!("config_hash={}", cfg.hash()), format!("seed={}", cfg.seed)];
    let mut out = Vec::new();
    for (sensor, data) in &tables {
        out.push((format!("features_{sensor}.csv"), data.to_csv(&header).into_bytes()));
    }
    let fused = fuse(&tables)?;
    let report = select_and_evaluate(&fused, 50, &cfg.learn, Protocol::KFold5, cfg.seed)?;
    out.push(("report.txt".into(), report.to_text(&header).into_bytes()));
    out.push(("confusion.csv".into(), report.confusion_csv().into_bytes()));
    Ok(out)
}

fn determinism() -> Outcome {
    let cfg = RunConfig::default();
    let mut sc = scenario(include_str!("../../../scenarios/five_class.toml"));
    sc.samples_per_class = 6;
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = run_once(&cfg, &sc, a.path()).map_err(|e| e.to_string())?;
    let second = run_once(&cfg, &sc, b.path()).map_err(|e| e.to_string())?;
    ensure(first.len() == second.len(), || "different artifact sets".into())?;
    for ((name, x), (_, y)) in first.iter().zip(&second) {
        ensure(x == y, || format!("{name} differs between runs"))?;
    }
    Ok(format!("{} artifacts byte-identical across two runs", first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("doppler law", doppler_law),
        ("range-bin law", range_bin_law),
        ("oracle equivalence", oracle_equivalence),
        ("isodata sweep", isodata_sweep),
        ("fractal recovery", fractal_recovery),
        ("feature count", feature_count),
        ("filter-bank GA", ga_contract),
        ("end-to-end benchmark", end_to_end),
        ("imitation probe", imitation_probe),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail}) [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
