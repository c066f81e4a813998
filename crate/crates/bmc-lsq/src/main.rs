use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bmc_lsq::cli;
use bmc_lsq::config::RunConfig;
use bmc_lsq::constants::ErgodicityProfile;
use bmc_lsq::error::Result;

#[derive(Parser)]
#[command(
    name = "bmc-lsq",
    version,
    about = "Branching-chain simulation and least-squares transition-density estimation"
)]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (TOML); omitted means the built-in study defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker thread cap; overrides the configuration (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory; the BMC_LSQ_OUT environment variable overrides this.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one tree sample and persist it in the binary layout.
    Simulate,
    /// Fit the density estimator at the configured (lambda, tau).
    Fit,
    /// Cross-validate over the (lambda, tau) grid and print the selection.
    Cv,
    /// Emit the data behind one of the four study figures.
    Figures {
        /// Figure index.
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
    },
    /// Tail-frequency lab for the concentration bound on the two-point chain.
    Concentration,
    /// Convergence-rate sweep across drift slopes.
    Rate,
    /// Print the derived theory constants for one ergodicity profile.
    Constants {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "R")]
        r: f64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        gamma: f64,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(args: Args) -> Result<()> {
    if let Command::Constants { alpha, r, n, gamma } = args.command {
        let profile = ErgodicityProfile::new(alpha, r, n, gamma)?;
        print!("{}", cli::constants_report(&profile));
        return Ok(());
    }

    let mut cfg = match &args.config {
        Some(path) => RunConfig::parse_file(path)?,
        None => RunConfig::paper_default(),
    };
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    if let Some(jobs) = args.jobs {
        cfg.run.jobs = jobs;
    }
    if cfg.run.jobs > 0 {
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.run.jobs)
            .build_global();
    }

    let out_dir = std::env::var_os("BMC_LSQ_OUT")
        .map(PathBuf::from)
        .or_else(|| args.out.clone())
        .unwrap_or_else(|| PathBuf::from(&cfg.run.out_dir));
    std::fs::create_dir_all(&out_dir)?;

    let written = match args.command {
        Command::Simulate => cli::run_simulate(&cfg, &out_dir)?,
        Command::Fit => cli::run_fit(&cfg, &out_dir)?,
        Command::Cv => cli::run_cv(&cfg, &out_dir)?,
        Command::Figures { which } => cli::run_figure(which, &cfg, &out_dir)?,
        Command::Concentration => cli::run_concentration_cmd(&cfg, &out_dir)?,
        Command::Rate => cli::run_rate_cmd(&cfg, &out_dir)?,
        Command::Constants { .. } => unreachable!("handled above"),
    };
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
