//! `twistor-kepler`: verification suites, trajectory export and orbit
//! classification.
//!
//! Exit codes: 0 on success, 1 on a numerical or invariant failure, 2 on a
//! usage or parse error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod classify;
mod config;
mod output;
mod simulate;
mod verify;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FileConfig, Format, Overrides, RunConfig, Scenario};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn usage(e: impl fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub fn numerical(e: impl fmt::Display) -> Self {
        CliError::Numerical(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "twistor-kepler", version, about = "Twistor Kepler problem: verify, simulate, classify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override, repeatable: `--tol flow=1e-8`, `--tol all=1e-3`.
    #[arg(long = "tol", value_name = "KEY=VAL", value_parser = config::parse_tol)]
    tol: Vec<(String, f64)>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run all property suites.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Integrate a scenario and write the trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        scenario: Option<Scenario>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Classify the coadjoint orbit of j0(E, rho) for rho read from a file.
    Classify {
        /// Anti-hermitian matrix, one row per line.
        input: PathBuf,
    },
}

fn resolve(common: Common, mut flags: Overrides) -> Result<RunConfig, CliError> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path).map_err(CliError::Usage)?,
        None => FileConfig::default(),
    };
    flags.n = common.n;
    flags.seed = common.seed;
    flags.tol = common.tol;
    RunConfig::resolve(file, flags).map_err(CliError::Usage)
}

fn cmd_verify(cfg: &RunConfig) -> Result<(), CliError> {
    let reports = verify::run(cfg);
    let mut failed = Vec::new();
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        match &r.error {
            Some(e) => println!("{status} {:<20} error: {e}", r.name),
            None => println!("{status} {:<20} residual {:.3e} (tol {:.1e})", r.name, r.residual, r.tolerance),
        }
        if !r.passed() {
            failed.push(r.name);
        }
    }
    if failed.is_empty() {
        println!("all {} suites passed (n = {}, seed = {})", reports.len(), cfg.n, cfg.seed);
        Ok(())
    } else {
        Err(CliError::Numerical(format!("failed suites: {}", failed.join(", "))))
    }
}

fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let table = simulate::run(cfg)?;
    let meta = output::Metadata {
        n: cfg.n,
        seed: cfg.seed,
        scenario: cfg.scenario.map(|s| s.to_string()).unwrap_or_default(),
        conventions_hash: output::conventions_hash(),
    };
    let io_err = |e: std::io::Error| CliError::Usage(format!("cannot write output: {e}"));
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).map_err(io_err)?;
            let mut w = BufWriter::new(file);
            output::write_table(&mut w, &table, &meta, cfg.format).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            output::write_table(&mut w, &table, &meta, cfg.format).map_err(io_err)?;
        }
    }
    Ok(())
}

fn cmd_classify(input: &PathBuf) -> Result<(), CliError> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    let rho = classify::parse_matrix(&text)?;
    let report = classify::classify(&rho)?;
    println!("label {}", report.label);
    println!("rank {}", report.rank);
    println!(
        "square_zero {} (residual {:.3e})",
        report.square_zero, report.square_residual
    );
    if report.consistent() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "j0 has rank {} and square-zero {} for label {}",
            report.rank, report.square_zero, report.label
        )))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify { common } => cmd_verify(&resolve(common, Overrides::default())?),
        Command::Simulate {
            common,
            scenario,
            out,
            format,
            t_end,
            dt,
        } => {
            let flags = Overrides {
                scenario,
                out,
                format,
                t_end,
                dt,
                ..Default::default()
            };
            cmd_simulate(&resolve(common, flags)?)
        }
        Command::Classify { input } => cmd_classify(&input),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
