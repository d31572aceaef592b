//! `aps`: benchmark energy estimation from randomized Pauli measurements.
//!
//! ```text
//! aps estimate --hamiltonian h.ham --method aps --shots 1000 --reps 10 --seed 1 --out r.json --format json
//! aps compare  --hamiltonian h.ham --shots 1000 --reps 10 --seed 1 --out r.csv --format csv
//! ```

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pauli_shadows::bench::{
    compare_methods, reports_to_csv, reports_to_json, run_benchmark, ExperimentConfig, Method,
    OutputFormat, StateSource, DEFAULT_REPETITIONS, DEFAULT_SHOTS,
};
use pauli_shadows::samplers::DEFAULT_LBCS_TOL;

#[derive(Parser)]
#[command(
    name = "aps",
    version,
    about = "Energy estimation benchmarks for Pauli shadows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark a single method.
    Estimate {
        #[arg(long, value_parser = parse_method)]
        method: Method,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Benchmark cs, lbcs and aps with identical settings.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Hamiltonian file, one `<coefficient> <pauli-string>` per line.
    #[arg(long)]
    hamiltonian: PathBuf,
    /// State file (2^n lines of `<re> <im>`); defaults to the ground state.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: usize,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_LBCS_TOL)]
    lbcs_tol: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output path, `-` for stdout.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = parse_format, default_value = "json")]
    format: OutputFormat,
    /// Keep wall-clock timings in JSON output (makes it run-dependent).
    #[arg(long)]
    timings: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse()
}

impl CommonArgs {
    fn config(&self, method: Method) -> ExperimentConfig {
        ExperimentConfig {
            hamiltonian_path: self.hamiltonian.clone(),
            state_source: match &self.state {
                Some(p) => StateSource::File(p.clone()),
                None => StateSource::GroundState,
            },
            method,
            shots: self.shots,
            repetitions: self.reps,
            master_seed: self.seed,
            lbcs_tol: self.lbcs_tol,
            workers: self.workers,
            output_format: self.format,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (common, reports) = match &cli.command {
        Command::Estimate { method, common } => {
            let report = run_benchmark(&common.config(*method))?;
            (common, vec![report])
        }
        Command::Compare { common } => (common, compare_methods(&common.config(Method::Aps))?),
    };
    let text = match common.format {
        OutputFormat::Csv => reports_to_csv(&reports),
        OutputFormat::Json => reports_to_json(&reports, common.timings),
    };
    if common.out.as_os_str() == "-" {
        io::stdout().write_all(text.as_bytes())?;
    } else {
        fs::write(&common.out, text)
            .with_context(|| format!("writing {}", common.out.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
