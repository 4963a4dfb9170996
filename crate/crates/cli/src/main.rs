mod config;
mod experiments;
mod output;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{Config, ExperimentKind};
use output::Manifest;

#[derive(Parser)]
#[command(name = "oamsim", version, about = "Synthetic-lattice simulations of OAM cavity arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Total transmission 𝒯(ω) and eigenvalues.
    Spectrum(RunArgs),
    /// 𝒯(ω) for every flux p/q with q ≤ q_max.
    Butterfly(RunArgs),
    /// |T|² from one input to every mode.
    EdgeMap(RunArgs),
    /// Average OAM displacement l̄_e(ω).
    Displacement(RunArgs),
    /// Chern numbers of the magnetic Bloch bands.
    Chern(RunArgs),
    /// Magnetic Bloch band energies.
    Bands(RunArgs),
    /// Monte Carlo l̄_e(ω) under component errors.
    Disorder(RunArgs),
    /// Gap scan and polarized edge maps of the spin Hall model.
    Qsh(RunArgs),
    /// Transfer-matrix dispersion against the tight-binding band.
    DispersionCheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Check the config and exit without computing.
    #[arg(long)]
    validate_only: bool,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn split(cmd: Command) -> (ExperimentKind, RunArgs) {
    match cmd {
        Command::Spectrum(a) => (ExperimentKind::Spectrum, a),
        Command::Butterfly(a) => (ExperimentKind::Butterfly, a),
        Command::EdgeMap(a) => (ExperimentKind::EdgeMap, a),
        Command::Displacement(a) => (ExperimentKind::Displacement, a),
        Command::Chern(a) => (ExperimentKind::Chern, a),
        Command::Bands(a) => (ExperimentKind::Bands, a),
        Command::Disorder(a) => (ExperimentKind::Disorder, a),
        Command::Qsh(a) => (ExperimentKind::Qsh, a),
        Command::DispersionCheck(a) => (ExperimentKind::DispersionCheck, a),
    }
}

fn kind_name(kind: ExperimentKind) -> String {
    serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = split(cli.command);

    let mut cfg = match &args.config {
        Some(path) => match config::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("fatal: config: {e:#}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        None => Config::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }

    let diags = validate::validate(kind, &cfg);
    for d in &diags {
        eprintln!("{d}");
    }
    if validate::has_fatal(&diags) {
        return ExitCode::from(EXIT_CONFIG);
    }
    if args.validate_only {
        println!("config ok");
        return ExitCode::SUCCESS;
    }

    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("fatal: threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }

    let start = Instant::now();
    let run = match experiments::run(kind, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(if e.downcast_ref::<oam_lattice::Error>().is_some() { EXIT_NUMERIC } else { 1 });
        }
    };
    match emit(kind, &cfg, run, &args, start) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn emit(kind: ExperimentKind, cfg: &Config, run: experiments::RunOutput, args: &RunArgs, start: Instant) -> anyhow::Result<()> {
    let mut files = run.files;
    // The echo re-parses to the same config and reproduces every data file.
    files.add("config.toml", toml::to_string(cfg)?.into_bytes());
    let manifest = Manifest {
        artifact: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: kind_name(kind),
        seed: cfg.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
        config: serde_json::to_value(cfg)?,
        results: run.results,
        files: files.entries(),
    };
    for path in files.commit(&args.out, &manifest)? {
        println!("{}", path.display());
    }
    Ok(())
}
