use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::integrate::{IntegrationSettings, Method};
use crate::potential::{parse_potential, Potential};
use crate::solvers::{Solver, DEFAULT_QUAD_POINTS, DEFAULT_SLICES};

pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_REFINE_ITERS: usize = crate::analysis::DEFAULT_REFINE_ITERS;
pub const DEFAULT_COMPARE_STEPS: [usize; 9] = [5, 6, 7, 8, 9, 10, 11, 12, 300];
pub const DEFAULT_COMPARE_SLICES: [usize; 7] = [10, 20, 50, 100, 200, 500, 1000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// T, R and amplitudes at one energy
    Transmit,
    /// T over a uniform energy grid
    Sweep,
    /// peak search with harmonic-level comparison
    Resonances,
    /// ψ inside the barrier at one energy
    Wavefunction,
    /// backward integration vs transfer matrix across resolutions
    Compare,
    /// bound state of the untruncated parabolic well
    Eigen,
}

impl Command {
    fn default_points(self) -> usize {
        match self {
            Command::Resonances => 2000,
            _ => 200,
        }
    }

    fn takes_energy(self) -> bool {
        matches!(self, Command::Transmit | Command::Wavefunction)
    }

    fn takes_range(self) -> bool {
        matches!(self, Command::Sweep | Command::Resonances | Command::Compare)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Backward,
    Tmm,
    Wkb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything that may appear in a config file or on the command line.
/// Unset values fall back to the file, then to defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub command: Option<Command>,
    pub potential: Option<String>,
    pub potential_text: Option<String>,
    pub solver: Option<SolverKind>,
    pub method: Option<Method>,
    pub steps: Option<usize>,
    pub slices: Option<usize>,
    pub quad_points: Option<usize>,
    pub energy: Option<f64>,
    pub emin: Option<f64>,
    pub emax: Option<f64>,
    pub points: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub level: Option<usize>,
    pub refine_iters: Option<usize>,
    pub compare_steps: Option<Vec<usize>>,
    pub compare_slices: Option<Vec<usize>>,
    pub reference_steps: Option<usize>,
}

impl Settings {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut s: Settings =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // file paths inside a config are relative to the config file
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(p) = &s.potential {
            if !p.starts_with("builtin:") && Path::new(p).is_relative() {
                s.potential = Some(base.join(p).to_string_lossy().into_owned());
            }
        }
        if let Some(o) = &s.output {
            if o.is_relative() {
                s.output = Some(base.join(o));
            }
        }
        Ok(s)
    }

    /// Values set in `self` win over `file`.
    pub fn overlay(self, file: Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: self.$f.or(file.$f)),* } };
        }
        pick!(
            command, potential, potential_text, solver, method, steps, slices, quad_points, energy, emin, emax,
            points, output, format, threads, level, refine_iters, compare_steps, compare_slices, reference_steps
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum PotentialSource {
    Builtin(String),
    File(PathBuf),
    Inline(String),
}

impl PotentialSource {
    pub fn load(&self) -> Result<Potential, CliError> {
        match self {
            PotentialSource::Builtin(spec) => parse_potential(spec).map_err(CliError::from),
            PotentialSource::Inline(text) => parse_potential(text).map_err(CliError::from),
            PotentialSource::File(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                parse_potential(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRange {
    pub emin: f64,
    pub emax: f64,
    pub points: usize,
}

/// A validated run description; echoed into JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub potential: PotentialSource,
    pub solver: SolverKind,
    pub method: Method,
    pub steps: usize,
    pub slices: usize,
    pub quad_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<EnergyRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub threads: Option<usize>,
    pub level: usize,
    pub refine_iters: usize,
    pub compare_steps: Vec<usize>,
    pub compare_slices: Vec<usize>,
    pub reference_steps: usize,
}

fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        Err(CliError::Config(format!("--{name} must be at least 1")))
    } else {
        Ok(v)
    }
}

impl RunConfig {
    pub fn from_settings(s: Settings) -> Result<Self, CliError> {
        let command = s
            .command
            .ok_or_else(|| CliError::Config("no command given (transmit, sweep, resonances, wavefunction, compare, eigen)".into()))?;
        let potential = match (s.potential, s.potential_text) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give either --potential or --potential-text, not both".into()))
            }
            (None, None) => return Err(CliError::Config("no potential given (--potential <file|builtin:name>)".into())),
            (None, Some(text)) => PotentialSource::Inline(text),
            (Some(p), None) => match p.strip_prefix("builtin:") {
                Some(name) => PotentialSource::Builtin(name.to_string()),
                None => PotentialSource::File(PathBuf::from(p)),
            },
        };

        let has_range = s.emin.is_some() || s.emax.is_some() || s.points.is_some();
        let energy = if command.takes_energy() {
            if has_range {
                return Err(CliError::Config(format!("`{}` takes --energy, not an energy range", name(command))));
            }
            let e = s.energy.ok_or_else(|| CliError::Config(format!("`{}` needs --energy", name(command))))?;
            if !e.is_finite() {
                return Err(CliError::Config("--energy must be finite".into()));
            }
            Some(e)
        } else {
            if s.energy.is_some() {
                return Err(CliError::Config(format!("`{}` does not take --energy", name(command))));
            }
            None
        };
        let range = if command.takes_range() {
            let (Some(emin), Some(emax)) = (s.emin, s.emax) else {
                return Err(CliError::Config(format!("`{}` needs --emin and --emax", name(command))));
            };
            let points = s.points.unwrap_or(command.default_points());
            if points < 2 {
                return Err(CliError::Config("--points must be at least 2".into()));
            }
            if !(emin.is_finite() && emax.is_finite() && emax > emin) {
                return Err(CliError::Config(format!("invalid energy range [{emin}, {emax}]")));
            }
            Some(EnergyRange { emin, emax, points })
        } else {
            if has_range {
                return Err(CliError::Config(format!("`{}` does not take an energy range", name(command))));
            }
            None
        };

        let solver = s.solver.unwrap_or(SolverKind::Backward);
        if command == Command::Wavefunction && solver != SolverKind::Backward {
            return Err(CliError::Config("`wavefunction` needs the backward solver".into()));
        }
        let format = s.format.unwrap_or_else(|| match &s.output {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
            _ => Format::Csv,
        });
        if let Some(t) = s.threads {
            positive("threads", t)?;
        }
        let compare_steps = s.compare_steps.unwrap_or_else(|| DEFAULT_COMPARE_STEPS.to_vec());
        let compare_slices = s.compare_slices.unwrap_or_else(|| DEFAULT_COMPARE_SLICES.to_vec());
        for &v in compare_steps.iter().chain(&compare_slices) {
            positive("compare-steps/--compare-slices entries", v)?;
        }
        Ok(RunConfig {
            command,
            potential,
            solver,
            method: s.method.unwrap_or(Method::Rk4),
            steps: positive("steps", s.steps.unwrap_or(DEFAULT_STEPS))?,
            slices: positive("slices", s.slices.unwrap_or(DEFAULT_SLICES))?,
            quad_points: positive("quad-points", s.quad_points.unwrap_or(DEFAULT_QUAD_POINTS))?,
            energy,
            range,
            output: s.output,
            format,
            threads: s.threads,
            level: s.level.unwrap_or(0),
            refine_iters: positive("refine-iters", s.refine_iters.unwrap_or(DEFAULT_REFINE_ITERS))?,
            compare_steps,
            compare_slices,
            reference_steps: positive("reference-steps", s.reference_steps.unwrap_or(DEFAULT_STEPS))?,
        })
    }

    pub fn integration(&self, steps: usize) -> IntegrationSettings {
        IntegrationSettings::new(self.method, steps).expect("step count validated")
    }

    pub fn solver(&self) -> Solver {
        match self.solver {
            SolverKind::Backward => Solver::Backward(self.integration(self.steps)),
            SolverKind::Tmm => Solver::TransferMatrix { slices: self.slices },
            SolverKind::Wkb => Solver::Wkb { quad_points: self.quad_points },
        }
    }
}

fn name(c: Command) -> String {
    c.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}
