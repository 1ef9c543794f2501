use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{derive_seed, string_seed, CubeConfig, DspConfig, Failure, LearnConfig, Manifest, ManifestEntry, RunConfig, Scenario};
use crate::complexity::{beta_bar_with, iwv_diagram, IwvDiagram};
use crate::dsp::{
    decode_spectrogram, encode_cube, encode_spectrogram, highpass_filter, isodata_threshold, range_doppler_cube, resize_spectrogram,
    stft_spectrogram, RangeDopplerCube, Spectrogram,
};
use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureVector, FilterBank};
use crate::learn::{evaluate_with, mrmr_select, train_on_subset, Dataset, EvalReport, FullRowModel, Protocol, Sample};
use crate::sim::{add_noise, read_iq, script_motion, synthesize_fmcw, synthesize_return, write_iq, IqSeries, ScattererTrack};

/// One simulated capture of one sample by one sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Capture {
    pub iq: IqSeries,
    /// Dechirped FMCW capture when cubes are enabled.
    pub fmcw: Option<IqSeries>,
    pub fc: f64,
}

/// Writes through a temporary sibling and renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// `x.iq` → `x.fmcw.iq`.
pub fn fmcw_path(iq_path: &Path) -> PathBuf {
    iq_path.with_extension("fmcw.iq")
}

fn tracks_at(scenario: &Scenario, class: usize, index: usize, n: usize, rate: f64) -> Result<Vec<ScattererTrack>> {
    let mut tracks = Vec::new();
    for a in scenario.realize(class, index) {
        tracks.extend(script_motion(a.kind, &a.params, n, rate)?);
    }
    for c in &scenario.clutter {
        tracks.push(ScattererTrack::stationary(c.range, c.rcs, n)?);
    }
    Ok(tracks)
}

pub fn simulate_capture(cfg: &RunConfig, scenario: &Scenario, class: usize, index: usize, sensor: &str) -> Result<Capture> {
    let radar = cfg.sensor(sensor)?;
    let n = (scenario.duration_s * radar.sample_rate).round() as usize;
    let tracks = tracks_at(scenario, class, index, n, radar.sample_rate)?;
    let seed = derive_seed(scenario.seed, &[class as u64, index as u64, string_seed(sensor)]);
    let iq = add_noise(&synthesize_return(radar, &tracks, n)?, scenario.snr_db, seed)?;
    let fmcw = if cfg.cube.enabled {
        let sweeps = (scenario.duration_s * radar.sweep_rate).round() as usize;
        let tracks = tracks_at(scenario, class, index, sweeps, radar.sweep_rate)?;
        let raw = synthesize_fmcw(radar, &tracks, sweeps, cfg.cube.samples_per_sweep)?;
        Some(add_noise(&raw, scenario.snr_db, seed ^ 0xF)?)
    } else {
        None
    };
    Ok(Capture { iq, fmcw, fc: radar.fc })
}

/// Simulates every (class, repetition, sensor) capture into `out_dir` and
/// writes `manifest.toml` there.
pub fn simulate_corpus(cfg: &RunConfig, scenario: &Scenario, out_dir: &Path) -> Result<Manifest> {
    for s in &scenario.sensors {
        cfg.sensor(s)?;
    }
    let jobs: Vec<(usize, usize, &String)> = (0..scenario.classes.len())
        .flat_map(|c| (0..scenario.samples_per_class).map(move |i| (c, i)))
        .flat_map(|(c, i)| scenario.sensors.iter().map(move |s| (c, i, s)))
        .collect();
    let entries = jobs
        .par_iter()
        .map(|&(c, i, sensor)| {
            let cap = simulate_capture(cfg, scenario, c, i, sensor)?;
            let id = scenario.sample_id(c, i);
            let rel = format!("{sensor}/{id}.iq");
            let path = out_dir.join(&rel);
            std::fs::create_dir_all(path.parent().expect("has parent"))?;
            write_iq(&path, &cap.iq, cap.fc)?;
            if let Some(f) = &cap.fmcw {
                write_iq(&fmcw_path(&path), f, cap.fc)?;
            }
            Ok(ManifestEntry {
                sample_id: id,
                label: scenario.classes[c].name.clone(),
                signer: scenario.classes[c].signer.clone(),
                sensor: sensor.clone(),
                path: rel,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut manifest = Manifest::new(cfg.hash(), scenario.seed, scenario.class_names());
    manifest.entries = entries;
    manifest.validate()?;
    write_atomic(&out_dir.join("manifest.toml"), manifest.to_toml().as_bytes())?;
    Ok(manifest)
}

/// Optional high-pass, STFT, optional isodata, resize.
pub fn preprocess(iq: &IqSeries, dsp: &DspConfig) -> Result<Spectrogram> {
    let filtered;
    let input = if dsp.apply_hpf {
        filtered = highpass_filter(iq, dsp.hpf_cutoff_hz)?;
        &filtered
    } else {
        iq
    };
    let spec = stft_spectrogram(input, dsp.window_len, dsp.overlap)?;
    let spec = if dsp.isodata { isodata_threshold(&spec)?.1 } else { spec };
    resize_spectrogram(&spec, dsp.image_size, dsp.image_size)
}

/// Switches for [`process_manifest`] that sit outside the run config.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProcessOptions {
    /// Skip the high-pass stage regardless of the config.
    pub no_hpf: bool,
    /// Also write a range-Doppler cube per entry from its FMCW companion file.
    pub cubes: bool,
}

impl ProcessOptions {
    pub fn variant(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.no_hpf {
            v.push("no_hpf".to_string());
        }
        v
    }
}

/// Processes every manifest entry into `out_dir/<sensor>/<id>.spec` (and
/// `<id>.cube` on request). Failed entries are reported in the returned
/// index and do not stop the run.
pub fn process_manifest(
    cfg: &RunConfig,
    manifest: &Manifest,
    base: &Path,
    out_dir: &Path,
    opts: ProcessOptions,
) -> Result<Manifest> {
    let mut dsp = cfg.dsp.clone();
    if opts.no_hpf {
        dsp.apply_hpf = false;
    }
    let results: Vec<std::result::Result<ManifestEntry, Failure>> = manifest
        .entries
        .par_iter()
        .map(|e| {
            let run = || -> Result<ManifestEntry> {
                let iq_path = manifest.resolve(base, e);
                let (iq, _) = read_iq(&iq_path)?;
                let spec = preprocess(&iq, &dsp)?;
                if opts.cubes {
                    let (fmcw, _) = read_iq(&fmcw_path(&iq_path))?;
                    let cube = build_cube(&fmcw, cfg.sensor(&e.sensor)?, &cfg.cube)?;
                    write_atomic(&out_dir.join(format!("{}/{}.cube", e.sensor, e.sample_id)), &encode_cube(&cube)?)?;
                }
                let rel = format!("{}/{}.spec", e.sensor, e.sample_id);
                write_atomic(&out_dir.join(&rel), &encode_spectrogram(&spec)?)?;
                Ok(ManifestEntry { path: rel, ..e.clone() })
            };
            run().map_err(|err| Failure { sample_id: e.sample_id.clone(), sensor: e.sensor.clone(), error: err.to_string() })
        })
        .collect();
    let mut index = Manifest::new(cfg.hash(), manifest.seed, manifest.classes.clone());
    index.variant = opts.variant();
    for r in results {
        match r {
            Ok(e) => index.entries.push(e),
            Err(f) => index.failures.push(f),
        }
    }
    index.failures.extend(manifest.failures.iter().cloned());
    write_atomic(&out_dir.join("index.toml"), index.to_toml().as_bytes())?;
    Ok(index)
}

/// Range-Doppler cube over as many whole frames as the capture holds.
pub fn build_cube(fmcw: &IqSeries, radar: &crate::sim::RadarConfig, cube: &CubeConfig) -> Result<RangeDopplerCube> {
    let per_frame = cube.samples_per_sweep * cube.doppler_window;
    let frames = fmcw.len() / per_frame;
    if frames == 0 {
        return Err(Error::shape("capture shorter than one cube frame"));
    }
    range_doppler_cube(fmcw, radar, cube.samples_per_sweep, frames, cube.doppler_window)
}

pub fn capture_iwv(fmcw: &IqSeries, radar: &crate::sim::RadarConfig, cfg: &RunConfig) -> Result<IwvDiagram> {
    let cube = build_cube(fmcw, radar, &cfg.cube)?;
    iwv_diagram(&cube, radar.fc, cfg.complexity.velocity_bins)
}

pub fn capture_beta_bar(fmcw: &IqSeries, radar: &crate::sim::RadarConfig, cfg: &RunConfig) -> Result<f64> {
    beta_bar_with(&capture_iwv(fmcw, radar, cfg)?, cfg.complexity.welch_segment, cfg.complexity.welch_overlap)
}

/// The uniform FWCC bank implied by the config.
pub fn default_bank(cfg: &RunConfig) -> Result<FilterBank> {
    FilterBank::uniform(cfg.features.filters, cfg.dsp.image_size)
}

/// Labelled spectrograms of one sensor, in manifest order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramSet {
    pub classes: Vec<String>,
    pub entries: Vec<ManifestEntry>,
    pub specs: Vec<Spectrogram>,
}

impl SpectrogramSet {
    pub fn labels(&self) -> Vec<usize> {
        self.entries
            .iter()
            .map(|e| self.classes.iter().position(|c| *c == e.label).expect("label validated"))
            .collect()
    }
}

/// Simulates and preprocesses one sensor's view of a scenario in memory.
pub fn simulate_spectrograms(cfg: &RunConfig, scenario: &Scenario, sensor: &str) -> Result<SpectrogramSet> {
    let jobs: Vec<(usize, usize)> = (0..scenario.classes.len())
        .flat_map(|c| (0..scenario.samples_per_class).map(move |i| (c, i)))
        .collect();
    let out = jobs
        .par_iter()
        .map(|&(c, i)| {
            let cap = simulate_capture(cfg, scenario, c, i, sensor)?;
            let spec = preprocess(&cap.iq, &cfg.dsp)?;
            let entry = ManifestEntry {
                sample_id: scenario.sample_id(c, i),
                label: scenario.classes[c].name.clone(),
                signer: scenario.classes[c].signer.clone(),
                sensor: sensor.to_string(),
                path: String::new(),
            };
            Ok((entry, spec))
        })
        .collect::<Result<Vec<_>>>()?;
    let (entries, specs) = out.into_iter().unzip();
    Ok(SpectrogramSet { classes: scenario.class_names(), entries, specs })
}

/// Feature tables per sensor from labelled spectrograms.
pub fn featurize(set: &SpectrogramSet, bank: &FilterBank, cfg: &RunConfig) -> Result<BTreeMap<String, Dataset>> {
    let vectors: Vec<FeatureVector> = set
        .specs
        .par_iter()
        .zip(&set.entries)
        .map(|(spec, e)| extract_features(spec, bank, &e.sensor, &cfg.features))
        .collect::<Result<_>>()?;
    let labels = set.labels();
    let mut by_sensor: BTreeMap<String, (Vec<_>, Vec<Sample>)> = BTreeMap::new();
    for ((fv, e), label) in vectors.into_iter().zip(&set.entries).zip(labels) {
        let slot = by_sensor.entry(e.sensor.clone()).or_insert_with(|| (fv.tags.clone(), Vec::new()));
        slot.1.push(Sample {
            values: fv.values,
            label,
            sensor: e.sensor.clone(),
            sample_id: e.sample_id.clone(),
            signer: e.signer.clone(),
        });
    }
    by_sensor
        .into_iter()
        .map(|(sensor, (tags, samples))| Ok((sensor, Dataset::new(tags, samples, set.classes.clone())?)))
        .collect()
}

/// Loads the spectrograms listed in a processed index. Unreadable entries
/// become failures, appended after the index's own.
pub fn load_index(index: &Manifest, base: &Path) -> (SpectrogramSet, Vec<Failure>) {
    let loaded: Vec<std::result::Result<(ManifestEntry, Spectrogram), Failure>> = index
        .entries
        .par_iter()
        .map(|e| {
            std::fs::read(index.resolve(base, e))
                .map_err(Error::from)
                .and_then(|b| decode_spectrogram(&b))
                .map(|s| (e.clone(), s))
                .map_err(|err| Failure { sample_id: e.sample_id.clone(), sensor: e.sensor.clone(), error: err.to_string() })
        })
        .collect();
    let mut set = SpectrogramSet { classes: index.classes.clone(), entries: Vec::new(), specs: Vec::new() };
    let mut failures = index.failures.clone();
    for r in loaded {
        match r {
            Ok((e, s)) => {
                set.entries.push(e);
                set.specs.push(s);
            }
            Err(f) => failures.push(f),
        }
    }
    (set, failures)
}

/// [`load_index`] followed by [`featurize`].
pub fn featurize_index(
    cfg: &RunConfig,
    index: &Manifest,
    base: &Path,
    bank: &FilterBank,
) -> Result<(BTreeMap<String, Dataset>, Vec<Failure>)> {
    let (set, failures) = load_index(index, base);
    Ok((featurize(&set, bank, cfg)?, failures))
}

/// Protocol evaluation where each training split runs its own mRMR
/// selection of `k` features before fitting, so test rows never inform the
/// selection.
pub fn select_and_evaluate(data: &Dataset, k: usize, learn: &LearnConfig, protocol: Protocol, seed: u64) -> Result<EvalReport> {
    evaluate_with(data, protocol, seed, |train, s| {
        let subset = mrmr_select(train, k.min(train.n_features()))?;
        Ok(FullRowModel(train_on_subset(learn.model, train, &subset, &learn.hyperparams, s)?))
    })
}

/// Accuracy for each subset size, same split for every size.
pub fn accuracy_vs_k(data: &Dataset, ks: &[usize], learn: &LearnConfig, protocol: Protocol, seed: u64) -> Result<Vec<(usize, EvalReport)>> {
    ks.iter().map(|&k| Ok((k, select_and_evaluate(data, k, learn, protocol, seed)?))).collect()
}
