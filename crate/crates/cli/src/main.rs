//! `rendezvous`: classify instances, run simulations, batch experiments and
//! property suites.
//!
//! Exit codes: 0 success or rendezvous, 1 property failure, 2 invalid input
//! or configuration, 3 no contact within the horizon, 4 internal error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rendezvous_core::harness::{
    self, AlgorithmChoice, HarnessError, ReportFormat, RunConfig, Suite, DEFAULT_SEED, PRECISION_ENV, REPORT_CSV_HEADER,
};
use rendezvous_core::numerics::Precision;

const EXIT_PROPERTY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NO_CONTACT: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "rendezvous", version, about = "Planar two-agent rendezvous simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the feasibility and coverage verdicts of an instance as JSON.
    Classify { file: PathBuf },
    /// Simulate an instance and print the report.
    Simulate {
        file: PathBuf,
        /// aurv, lemma4 or plugin:<name>.
        #[arg(long, default_value = "aurv")]
        algorithm: String,
        #[arg(long)]
        max_phase: Option<u32>,
        /// Absolute-time horizon, as a decimal.
        #[arg(long)]
        max_time: Option<String>,
        #[arg(long)]
        max_segments: Option<usize>,
        /// Mantissa bits.
        #[arg(long, env = PRECISION_ENV)]
        precision: Option<u32>,
        #[arg(long)]
        eps_abs: Option<String>,
        #[arg(long)]
        eps_rel: Option<String>,
        /// Write both agents' traces to this file as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Run every instance of a JSON array and write one CSV row per instance.
    Batch {
        file: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = "aurv")]
        algorithm: String,
        #[arg(long, default_value_t = 1)]
        max_phase: u32,
        #[arg(long, env = PRECISION_ENV)]
        precision: Option<u32>,
    },
    /// Run a property suite: coverage, mirror, contact-oracle, durations or rot-north.
    Verify {
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn precision(bits: Option<u32>) -> Result<Precision, HarnessError> {
    match bits {
        Some(b) => Ok(Precision::new(b)?),
        None => Ok(Precision::DEFAULT),
    }
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

fn fail(e: HarnessError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_input_error() { EXIT_INPUT } else { EXIT_INTERNAL })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => fail(e),
    }
}

fn execute(command: Command) -> Result<ExitCode, HarnessError> {
    match command {
        Command::Classify { file } => {
            let instance = harness::read_instance(&file)?;
            let out = harness::classify(&instance, harness::precision_from_env()?);
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { file, algorithm, max_phase, max_time, max_segments, precision: bits, eps_abs, eps_rel, trace, format } => {
            let format: ReportFormat = format.parse()?;
            let config = RunConfig {
                algorithm: algorithm.parse::<AlgorithmChoice>()?,
                max_phase,
                max_time,
                max_segments,
                precision: precision(bits)?,
                eps_abs,
                eps_rel,
            };
            let instance = harness::read_instance(&file)?;
            let report = harness::run(&instance, &config)?;
            if let Some(path) = trace {
                write(&path, &harness::traces_json(&report).to_string())?;
            }
            match format {
                ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&harness::report_json(&report))?),
                ReportFormat::Csv => println!("{REPORT_CSV_HEADER}\n{}", harness::report_csv_row(&report)),
            }
            Ok(if report.outcome.is_rendezvous() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NO_CONTACT) })
        }
        Command::Batch { file, report, algorithm, max_phase, precision: bits } => {
            let config = RunConfig {
                algorithm: algorithm.parse()?,
                max_phase: Some(max_phase),
                precision: precision(bits)?,
                ..RunConfig::default()
            };
            write(&report, &harness::batch_file(&file, &config)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, seed } => {
            let suite: Suite = suite.parse()?;
            let rep = harness::run_suite(suite, seed);
            print!("{rep}");
            Ok(if rep.passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_PROPERTY) })
        }
    }
}
