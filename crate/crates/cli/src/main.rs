mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mdsig_core::learn::{ModelKind, Protocol};
use mdsig_core::pipeline::RunConfig;
use mdsig_core::Error;

#[derive(Parser)]
#[command(name = "mdsig", version, about = "Radar micro-Doppler signature pipeline")]
struct Cli {
    /// Run config (TOML). Built-in defaults when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario into I/Q captures and a manifest.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// HPF, STFT, isodata and resize every manifest entry.
    Process {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Skip the high-pass stage (ablation).
        #[arg(long)]
        no_hpf: bool,
        /// Also write range-Doppler cubes from the FMCW companion captures.
        #[arg(long)]
        cubes: bool,
    },
    /// Extract the per-sensor feature tables from processed spectrograms.
    Featurize {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// FWCC filter bank file; the uniform bank when omitted.
        #[arg(long, conflicts_with = "optimize_bank")]
        filterbank: Option<PathBuf>,
        /// Run the genetic filter-bank search first.
        #[arg(long)]
        optimize_bank: bool,
    },
    /// mRMR selection over one or more (fused) feature tables.
    Select {
        #[arg(long, num_args = 1.., required = true)]
        features: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Number of features to keep; the config's k_select when omitted.
        #[arg(long)]
        k: Option<usize>,
        /// Also evaluate accuracy over the config's k sweep.
        #[arg(long)]
        sweep: bool,
    },
    /// Fit a classifier and save it.
    Train {
        #[arg(long, num_args = 1.., required = true)]
        features: Vec<PathBuf>,
        /// Selection file from `select`; fresh mRMR selection when omitted.
        #[arg(long)]
        selection: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        model: Option<ModelKind>,
    },
    /// Score a saved model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        features: Vec<PathBuf>,
        /// Re-fit under this protocol with in-fold selection.
        #[arg(long, conflicts_with = "fixed")]
        protocol: Option<Protocol>,
        /// Apply the saved model as-is to every row.
        #[arg(long)]
        fixed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fractal complexity of each capture from its FMCW companion file.
    Complexity {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "signer")]
        group_by: commands::GroupBy,
    },
    /// Native vs imitation separability probe.
    ProbeImitation {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit PGM/CSV renderings.
    Render {
        #[command(subcommand)]
        what: render::Render,
    },
    /// Print the effective config as TOML.
    Config,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) => 2,
        Error::Io(_) | Error::Format(_) | Error::Shape(_) | Error::InsufficientData(_) | Error::Alignment(_) => 3,
        Error::Domain(_) | Error::Stratification(_) => 4,
    }
}

fn init_workers() -> Result<(), Error> {
    let Ok(v) = std::env::var("MDSIG_WORKERS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("MDSIG_WORKERS: expected a worker count, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Parse(format!("MDSIG_WORKERS: {e}")))
}

fn run(cli: Cli) -> Result<(), Error> {
    init_workers()?;
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = commands::Ctx::new(cfg);
    match cli.command {
        Command::Simulate { scenario, out } => commands::simulate(&ctx, &scenario, &out),
        Command::Process { manifest, out, no_hpf, cubes } => commands::process(&ctx, &manifest, &out, no_hpf, cubes),
        Command::Featurize { index, out, filterbank, optimize_bank } => {
            commands::featurize(&ctx, &index, &out, filterbank.as_deref(), optimize_bank)
        }
        Command::Select { features, out, k, sweep } => commands::select(&ctx, &features, &out, k, sweep),
        Command::Train { features, selection, out, model } => {
            commands::train(&ctx, &features, selection.as_deref(), &out, model)
        }
        Command::Eval { model, features, protocol, fixed, out } => {
            commands::eval(&ctx, &model, &features, protocol, fixed, out.as_deref())
        }
        Command::Complexity { manifest, out, group_by } => commands::complexity(&ctx, &manifest, &out, group_by),
        Command::ProbeImitation { features, out } => commands::probe(&ctx, &features, &out),
        Command::Render { what } => render::run(&ctx, what),
        Command::Config => {
            ctx.banner(ctx.cfg.seed);
            print!("{}", ctx.cfg.to_toml());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
