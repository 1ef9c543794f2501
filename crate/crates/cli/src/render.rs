use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Subcommand;
use mdsig_core::dsp::{decode_spectrogram, spectrogram_to_csv, spectrogram_to_pgm, Spectrogram};
use mdsig_core::pipeline::{capture_iwv, write_atomic};
use mdsig_core::sim::read_iq;
use mdsig_core::{Error, Result};

use crate::commands::{read_bytes, read_text, Ctx};

const PLOT_W: usize = 320;
const PLOT_H: usize = 160;
const MARGIN: usize = 12;

#[derive(Subcommand)]
pub enum Render {
    /// Spectrogram archive to PGM (and optionally CSV).
    Spectrogram {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Intensity-weighted velocity diagram of an FMCW capture.
    Iwv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        sensor: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Accuracy-vs-k curve file to a PGM line plot.
    Curve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Side-by-side table of two accuracy-vs-k curves (with / without HPF).
    Ablation {
        #[arg(long = "with")]
        with_hpf: PathBuf,
        #[arg(long = "without")]
        without_hpf: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run(ctx: &Ctx, what: Render) -> Result<()> {
    ctx.banner(ctx.cfg.seed);
    match what {
        Render::Spectrogram { input, out, csv } => {
            let spec = decode_spectrogram(&read_bytes(&input)?)?;
            write_atomic(&out, &spectrogram_to_pgm(&spec))?;
            if let Some(csv) = csv {
                write_atomic(&csv, spectrogram_to_csv(&spec).as_bytes())?;
            }
            println!("pgm: {} ({} x {})", out.display(), spec.n_time, spec.n_freq);
        }
        Render::Iwv { input, sensor, out, csv } => {
            let (fmcw, _) = read_iq(&input)?;
            let iwv = capture_iwv(&fmcw, ctx.cfg.sensor(&sensor)?, &ctx.cfg)?;
            let times = (0..iwv.n_frames).map(|t| t as f64 / iwv.frame_rate).collect();
            let image = Spectrogram::new(iwv.n_bins, iwv.n_frames, iwv.values.clone(), iwv.velocity_axis.clone(), times)?;
            write_atomic(&out, &spectrogram_to_pgm(&image))?;
            if let Some(csv) = csv {
                write_atomic(&csv, iwv.to_csv().as_bytes())?;
            }
            println!("pgm: {} ({} x {})", out.display(), iwv.n_frames, iwv.n_bins);
        }
        Render::Curve { input, out } => {
            let points = read_curve(&input)?;
            write_atomic(&out, &plot(&points))?;
            println!("pgm: {} ({} points)", out.display(), points.len());
        }
        Render::Ablation { with_hpf, without_hpf, out } => {
            let a = read_curve(&with_hpf)?;
            let b = read_curve(&without_hpf)?;
            if a.iter().map(|p| p.0).ne(b.iter().map(|p| p.0)) {
                return Err(Error::Alignment("the two curves use different k values".into()));
            }
            let mut body = String::from("k,hpf,no_hpf,delta\n");
            for (&(k, x), &(_, y)) in a.iter().zip(&b) {
                let _ = writeln!(body, "{k},{x:.6},{y:.6},{:.6}", x - y);
            }
            write_atomic(&out, ctx.commented(ctx.cfg.seed, &body).as_bytes())?;
            print!("{body}");
        }
    }
    Ok(())
}

/// `(k, accuracy)` rows of an accuracy-vs-k file.
fn read_curve(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = read_text(path)?;
    let bad = |n: usize| Error::Format(format!("{} line {n}: expected k,accuracy", path.display()));
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("k,") {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(k), Some(acc)) = (parts.next(), parts.next()) else {
            return Err(bad(i + 1));
        };
        let k: f64 = k.parse().map_err(|_| bad(i + 1))?;
        let acc: f64 = acc.parse().map_err(|_| bad(i + 1))?;
        points.push((k, acc));
    }
    if points.is_empty() {
        return Err(Error::InsufficientData(format!("{}: no curve points", path.display())));
    }
    Ok(points)
}

/// White canvas, black axes, grey quarter gridlines, accuracy on [0, 1].
fn plot(points: &[(f64, f64)]) -> Vec<u8> {
    let mut px = vec![255u8; PLOT_W * PLOT_H];
    let (x0, x1) = (MARGIN, PLOT_W - MARGIN);
    let (y0, y1) = (MARGIN, PLOT_H - MARGIN);
    for q in 0..=4 {
        let y = y1 - (y1 - y0) * q / 4;
        for x in x0..=x1 {
            px[y * PLOT_W + x] = if q == 0 { 0 } else { 200 };
        }
    }
    for y in y0..=y1 {
        px[y * PLOT_W + x0] = 0;
    }
    let kmin = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let kmax = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let span = if kmax > kmin { kmax - kmin } else { 1.0 };
    let to_px = |&(k, acc): &(f64, f64)| {
        let x = x0 as f64 + (k - kmin) / span * (x1 - x0) as f64;
        let y = y1 as f64 - acc.clamp(0.0, 1.0) * (y1 - y0) as f64;
        (x, y)
    };
    let mapped: Vec<(f64, f64)> = points.iter().map(to_px).collect();
    for w in mapped.windows(2) {
        let (a, b) = (w[0], w[1]);
        let steps = (b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let x = (a.0 + t * (b.0 - a.0)).round() as usize;
            let y = (a.1 + t * (b.1 - a.1)).round() as usize;
            px[y * PLOT_W + x] = 0;
        }
    }
    for &(x, y) in &mapped {
        let (x, y) = (x.round() as usize, y.round() as usize);
        for dy in y.saturating_sub(1)..=(y + 1).min(PLOT_H - 1) {
            for dx in x.saturating_sub(1)..=(x + 1).min(PLOT_W - 1) {
                px[dy * PLOT_W + dx] = 0;
            }
        }
    }
    let mut out = format!("P5\n{PLOT_W} {PLOT_H}\n255\n").into_bytes();
    out.extend(px);
    out
}
