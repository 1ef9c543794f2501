use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use mdsig_core::complexity::{comparison_report, summarize_betas};
use mdsig_core::features::{optimize_filterbank_ga, FeatureTag, FilterBank};
use mdsig_core::learn::{
    evaluate_model, fuse_and_select, mrmr_select, probe_with, train_on_subset, Dataset, EvalReport, FullRowModel,
    FusionResult, ModelKind, Protocol, TrainedModel,
};
use mdsig_core::pipeline::{
    accuracy_vs_k, capture_beta_bar, default_bank, fmcw_path, load_index, process_manifest,
    select_and_evaluate, simulate_corpus, write_atomic, Failure, Manifest, ProcessOptions, RunConfig, Scenario,
};
use mdsig_core::sim::read_iq;
use mdsig_core::{Error, Result};
use rayon::prelude::*;

pub struct Ctx {
    pub cfg: RunConfig,
    pub hash: String,
}

impl Ctx {
    pub fn new(cfg: RunConfig) -> Self {
        let hash = cfg.hash();
        Self { cfg, hash }
    }

    pub fn banner(&self, seed: u64) {
        println!("config_hash={} seed={seed}", self.hash);
    }

    /// Comment lines embedded at the top of every text output.
    pub fn header(&self, seed: u64) -> Vec<String> {
        vec![format!("config_hash={}", self.hash), format!("seed={seed}")]
    }

    pub fn commented(&self, seed: u64, body: &str) -> String {
        let mut out = String::new();
        for h in self.header(seed) {
            let _ = writeln!(out, "# {h}");
        }
        out.push_str(body);
        out
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GroupBy {
    Signer,
    Label,
}

fn base_dir(manifest: &Path) -> PathBuf {
    manifest.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn with_path(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| with_path(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| with_path(path, e))
}

fn report_failures(failures: &[Failure]) {
    for f in failures {
        eprintln!("failed: {}/{}: {}", f.sensor, f.sample_id, f.error);
    }
}

pub fn simulate(ctx: &Ctx, scenario: &Path, out: &Path) -> Result<()> {
    let sc = Scenario::load(scenario)?;
    ctx.banner(sc.seed);
    let manifest = simulate_corpus(&ctx.cfg, &sc, out)?;
    println!("captures: {}", manifest.entries.len());
    println!("manifest: {}", out.join("manifest.toml").display());
    Ok(())
}

pub fn process(ctx: &Ctx, manifest_path: &Path, out: &Path, no_hpf: bool, cubes: bool) -> Result<()> {
    let manifest = Manifest::load(manifest_path)?;
    manifest.check_hash(&ctx.hash)?;
    ctx.banner(manifest.seed);
    let opts = ProcessOptions { no_hpf, cubes };
    let index = process_manifest(&ctx.cfg, &manifest, &base_dir(manifest_path), out, opts)?;
    report_failures(&index.failures);
    println!("processed: {}", index.entries.len());
    println!("failed: {}", index.failures.len());
    if !index.variant.is_empty() {
        println!("variant: {}", index.variant.join(","));
    }
    println!("index: {}", out.join("index.toml").display());
    Ok(())
}

fn load_bank(ctx: &Ctx, filterbank: Option<&Path>) -> Result<FilterBank> {
    match filterbank {
        Some(p) => FilterBank::from_text(&read_text(p)?),
        None => default_bank(&ctx.cfg),
    }
}

pub fn featurize(ctx: &Ctx, index_path: &Path, out: &Path, filterbank: Option<&Path>, optimize: bool) -> Result<()> {
    let index = Manifest::load(index_path)?;
    index.check_hash(&ctx.hash)?;
    ctx.banner(ctx.cfg.seed);
    let (set, failures) = load_index(&index, &base_dir(index_path));
    report_failures(&failures);
    let bank = if optimize {
        let labels = set.labels();
        let ga = optimize_filterbank_ga(&set.specs, &labels, ctx.cfg.features.filters, &ctx.cfg.ga)?;
        println!("ga_best_fitness: {:.6}", ga.best_fitness);
        println!("ga_evaluations: {}", ga.evaluations);
        ga.bank
    } else {
        load_bank(ctx, filterbank)?
    };
    let tables = mdsig_core::pipeline::featurize(&set, &bank, &ctx.cfg)?;
    let mut header = ctx.header(ctx.cfg.seed);
    if !index.variant.is_empty() {
        header.push(format!("variant={}", index.variant.join(",")));
    }
    std::fs::create_dir_all(out)?;
    for (sensor, data) in &tables {
        let path = out.join(format!("features_{sensor}.csv"));
        write_atomic(&path, data.to_csv(&header).as_bytes())?;
        println!("features: {} ({} x {})", path.display(), data.n_samples(), data.n_features());
    }
    write_atomic(&out.join("filterbank.txt"), bank.to_text().as_bytes())?;
    Ok(())
}

/// Loads feature tables keyed by sensor.
pub fn load_tables(paths: &[PathBuf]) -> Result<BTreeMap<String, Dataset>> {
    let mut out = BTreeMap::new();
    for p in paths {
        let text = read_text(p)?;
        let data = Dataset::from_csv(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Format(format!("{}: {m}", p.display())),
            other => other,
        })?;
        let key = match data.samples.first() {
            Some(s) => s.sensor.clone(),
            None => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        };
        if out.insert(key.clone(), data).is_some() {
            return Err(Error::Alignment(format!("two feature tables for sensor '{key}'")));
        }
    }
    Ok(out)
}

/// One table, or the sample-aligned fusion of several.
pub fn load_combined(paths: &[PathBuf]) -> Result<Dataset> {
    let tables = load_tables(paths)?;
    if tables.len() == 1 {
        Ok(tables.into_values().next().expect("one table"))
    } else {
        mdsig_core::learn::fuse(&tables)
    }
}

fn selection_text(ctx: &Ctx, tags: &[FeatureTag], fused_width: usize) -> String {
    let mut body = format!("# fused_width={fused_width}\n# k={}\n", tags.len());
    for t in tags {
        let _ = writeln!(body, "{t}");
    }
    ctx.commented(ctx.cfg.seed, &body)
}

fn read_selection(path: &Path, data: &Dataset) -> Result<Vec<usize>> {
    let text = read_text(path)?;
    let mut subset = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tag: FeatureTag = line.parse().map_err(|e| Error::Format(format!("{} line {}: {e}", path.display(), i + 1)))?;
        let col = data
            .feature_tags
            .iter()
            .position(|t| *t == tag)
            .ok_or_else(|| Error::Alignment(format!("selected feature {tag} is not in the feature tables")))?;
        subset.push(col);
    }
    if subset.is_empty() {
        return Err(Error::Format(format!("{}: no features listed", path.display())));
    }
    Ok(subset)
}

pub fn select(ctx: &Ctx, features: &[PathBuf], out: &Path, k: Option<usize>, sweep: bool) -> Result<()> {
    ctx.banner(ctx.cfg.seed);
    let tables = load_tables(features)?;
    let k = k.unwrap_or(ctx.cfg.learn.k_select);
    let result = if tables.len() == 1 {
        let data = tables.values().next().expect("one table");
        let selected = mrmr_select(data, k.min(data.n_features()))?;
        FusionResult { dataset: data.select_features(&selected)?, fused_width: data.n_features(), selected }
    } else {
        fuse_and_select(&tables, k)?
    };
    std::fs::create_dir_all(out)?;
    write_atomic(
        &out.join("selection.txt"),
        selection_text(ctx, &result.dataset.feature_tags, result.fused_width).as_bytes(),
    )?;
    write_atomic(&out.join("composition.csv"), ctx.commented(ctx.cfg.seed, &result.composition_csv()).as_bytes())?;
    println!("fused_width: {}", result.fused_width);
    println!("selected: {}", result.selected.len());
    print!("{}", result.composition_csv());
    if sweep {
        let full = if tables.len() == 1 {
            tables.into_values().next().expect("one table")
        } else {
            mdsig_core::learn::fuse(&tables)?
        };
        let protocol = ctx.cfg.learn.protocol;
        let curve = accuracy_vs_k(&full, &ctx.cfg.learn.k_sweep, &ctx.cfg.learn, protocol, ctx.cfg.seed)?;
        let mut body = format!("# protocol={}\n# model={}\nk,accuracy\n", protocol.as_str(), ctx.cfg.learn.model.as_str());
        for (k, report) in &curve {
            let _ = writeln!(body, "{k},{:.6}", report.accuracy);
        }
        write_atomic(&out.join("accuracy_vs_k.csv"), ctx.commented(ctx.cfg.seed, &body).as_bytes())?;
        print!("{body}");
    }
    Ok(())
}

pub fn train(ctx: &Ctx, features: &[PathBuf], selection: Option<&Path>, out: &Path, model: Option<ModelKind>) -> Result<()> {
    ctx.banner(ctx.cfg.seed);
    let data = load_combined(features)?;
    let subset = match selection {
        Some(p) => read_selection(p, &data)?,
        None => mrmr_select(&data, ctx.cfg.learn.k_select.min(data.n_features()))?,
    };
    let kind = model.unwrap_or(ctx.cfg.learn.model);
    let trained = train_on_subset(kind, &data, &subset, &ctx.cfg.learn.hyperparams, ctx.cfg.seed)?;
    trained.save(out)?;
    println!("model: {} ({})", out.display(), kind.as_str());
    println!("features: {}", subset.len());
    println!("train_accuracy: {:.6}", trained.train_report().accuracy);
    Ok(())
}

pub fn eval(
    ctx: &Ctx,
    model_path: &Path,
    features: &[PathBuf],
    protocol: Option<Protocol>,
    fixed: bool,
    out: Option<&Path>,
) -> Result<()> {
    ctx.banner(ctx.cfg.seed);
    let model = TrainedModel::from_bytes(&read_bytes(model_path)?)?;
    let data = load_combined(features)?;
    if data.class_names != model.class_names() {
        return Err(Error::Alignment("feature tables and model disagree on the class list".into()));
    }
    let report: EvalReport = if fixed {
        evaluate_model(&FullRowModel(model), &data)?
    } else {
        let mut learn = ctx.cfg.learn.clone();
        learn.model = model.kind();
        let protocol = protocol.unwrap_or(learn.protocol);
        select_and_evaluate(&data, model.feature_subset().len(), &learn, protocol, ctx.cfg.seed)?
    };
    println!("accuracy: {:.6}", report.accuracy);
    print!("{}", report.confusion_csv());
    if let Some(dir) = out {
        let header = ctx.header(ctx.cfg.seed);
        write_atomic(&dir.join("report.txt"), report.to_text(&header).as_bytes())?;
        write_atomic(&dir.join("confusion.csv"), report.confusion_csv().as_bytes())?;
    }
    Ok(())
}

pub fn complexity(ctx: &Ctx, manifest_path: &Path, out: &Path, group_by: GroupBy) -> Result<()> {
    let manifest = Manifest::load(manifest_path)?;
    manifest.check_hash(&ctx.hash)?;
    ctx.banner(manifest.seed);
    let base = base_dir(manifest_path);
    let results: Vec<std::result::Result<f64, Failure>> = manifest
        .entries
        .par_iter()
        .map(|e| {
            let run = || -> Result<f64> {
                let (fmcw, _) = read_iq(&fmcw_path(&manifest.resolve(&base, e)))?;
                capture_beta_bar(&fmcw, ctx.cfg.sensor(&e.sensor)?, &ctx.cfg)
            };
            run().map_err(|err| Failure { sample_id: e.sample_id.clone(), sensor: e.sensor.clone(), error: err.to_string() })
        })
        .collect();
    let mut rows = String::from("sample_id,sensor,signer,label,beta_bar\n");
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut failures = Vec::new();
    for (e, r) in manifest.entries.iter().zip(results) {
        match r {
            Ok(b) => {
                let _ = writeln!(rows, "{},{},{},{},{b}", e.sample_id, e.sensor, e.signer, e.label);
                let key = match group_by {
                    GroupBy::Signer => &e.signer,
                    GroupBy::Label => &e.label,
                };
                groups.entry(key.clone()).or_default().push(b);
            }
            Err(f) => failures.push(f),
        }
    }
    report_failures(&failures);
    if groups.is_empty() {
        return Err(Error::InsufficientData(
            "no capture yielded a complexity estimate (cubes must be enabled when simulating)".into(),
        ));
    }
    let summary = groups
        .iter()
        .map(|(k, b)| Ok((k.clone(), summarize_betas(b)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let report = comparison_report(&summary);
    write_atomic(&out.join("betas.csv"), ctx.commented(manifest.seed, &rows).as_bytes())?;
    write_atomic(&out.join("complexity.csv"), ctx.commented(manifest.seed, &report).as_bytes())?;
    print!("{report}");
    println!("failed: {}", failures.len());
    Ok(())
}

pub fn probe(ctx: &Ctx, features: &Path, out: &Path) -> Result<()> {
    ctx.banner(ctx.cfg.seed);
    let data = load_combined(&[features.to_path_buf()])?;
    let pick = |signer: &str| {
        let idx: Vec<usize> = (0..data.n_samples()).filter(|&i| data.samples[i].signer == signer).collect();
        data.select_rows(&idx)
    };
    let (native, imitation) = (pick("native"), pick("imitation"));
    let report = probe_with(&native, &imitation, ctx.cfg.learn.probe_components, ctx.cfg.seed)?;
    let text = report.to_text(&ctx.header(ctx.cfg.seed));
    write_atomic(&out.join("probe.txt"), text.as_bytes())?;
    print!("{text}");
    Ok(())
}
