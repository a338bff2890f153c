//! Command-line front end.
//!
//! Exit status: 0 success, 2 configuration or parse error, 3 numerical
//! failure, 4 I/O error.

mod commands;
mod config;
mod output;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

pub use commands::{execute, CompareCurve, CompareResult, Diagnostics, EigenResult, Outcome, TransmitResult};
pub use config::{Command, EnergyRange, Format, PotentialSource, RunConfig, Settings, SolverKind};
pub use output::{to_csv, to_json, write_atomic, SCHEMA_VERSION};
pub use report::{render_report, resonance_table, sig6};

use crate::error::Error;
use crate::integrate::Method;
use crate::units::UnitSystem;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(Error),
    #[error("{0}")]
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

/// Quantum transmission through one-dimensional potential barriers.
///
/// The wave number in a region of constant V is k = sqrt((2m/ħ²)(E − V));
/// energies are in eV and lengths in nm.
#[derive(Debug, Parser)]
#[command(name = "barrierscope", version)]
pub struct Cli {
    /// What to compute (may also come from the config file)
    #[arg(value_enum)]
    pub command: Option<Command>,

    /// TOML file with any of the options below; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Potential file, or `builtin:<name> [key=value ...]` (square, parabola, double_barrier, arbitrary)
    #[arg(long)]
    pub potential: Option<String>,

    /// Potential given inline in the file format
    #[arg(long)]
    pub potential_text: Option<String>,

    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,

    /// Integrator for the backward solver: rk4 or numerov
    #[arg(long)]
    pub method: Option<Method>,

    /// Integration steps across the barrier (backward solver)
    #[arg(long)]
    pub steps: Option<usize>,

    /// Number of constant slabs (transfer-matrix solver)
    #[arg(long)]
    pub slices: Option<usize>,

    /// Simpson panels per forbidden interval (WKB)
    #[arg(long)]
    pub quad_points: Option<usize>,

    /// Energy in eV (transmit, wavefunction)
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,

    /// Lower end of the energy range in eV
    #[arg(long, allow_negative_numbers = true)]
    pub emin: Option<f64>,

    /// Upper end of the energy range in eV
    #[arg(long, allow_negative_numbers = true)]
    pub emax: Option<f64>,

    /// Number of grid energies, endpoints included
    #[arg(long)]
    pub points: Option<usize>,

    /// Data file to write; the report always goes to stdout
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Data file format (default from the output extension, else csv)
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Worker threads for sweeps
    #[arg(long, env = "BARRIERSCOPE_THREADS")]
    pub threads: Option<usize>,

    /// Oscillator level for `eigen`
    #[arg(long)]
    pub level: Option<usize>,

    /// Maximum golden-section iterations per resonance
    #[arg(long)]
    pub refine_iters: Option<usize>,

    /// Comma-separated step counts for `compare`
    #[arg(long, value_delimiter = ',')]
    pub compare_steps: Option<Vec<usize>>,

    /// Comma-separated slab counts for `compare`
    #[arg(long, value_delimiter = ',')]
    pub compare_slices: Option<Vec<usize>>,

    /// Steps of the backward reference curve for `compare`
    #[arg(long)]
    pub reference_steps: Option<usize>,
}

impl Cli {
    /// Flag values merged over the config file.
    pub fn settings(self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(path) => Settings::from_toml_file(path)?,
            None => Settings::default(),
        };
        let flags = Settings {
            command: self.command,
            potential: self.potential,
            potential_text: self.potential_text,
            solver: self.solver,
            method: self.method,
            steps: self.steps,
            slices: self.slices,
            quad_points: self.quad_points,
            energy: self.energy,
            emin: self.emin,
            emax: self.emax,
            points: self.points,
            output: self.output,
            format: self.format,
            threads: self.threads,
            level: self.level,
            refine_iters: self.refine_iters,
            compare_steps: self.compare_steps,
            compare_slices: self.compare_slices,
            reference_steps: self.reference_steps,
        };
        Ok(flags.overlay(file))
    }
}

/// Runs a validated configuration: computes, writes the data file (if any)
/// and returns the report text.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    let units = UnitSystem::electron();
    let work = || execute(cfg, &units);
    let (outcome, diag) = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    if let Some(path) = &cfg.output {
        write_atomic(path, &output::render(cfg, &outcome, &diag))?;
    }
    Ok(render_report(&outcome, &diag))
}

/// Entry point of the binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = cli
        .settings()
        .and_then(RunConfig::from_settings)
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
