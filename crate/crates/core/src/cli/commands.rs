use serde::Serialize;

use super::config::{Command, RunConfig};
use super::CliError;
use crate::analysis::{
    compare_to_harmonic, density_peaks, density_profile, scan_resonances, shoot_level, sweep,
    BoundState, ParabolicWell, PointFailure, ResonancePeak, TransmissionCurve,
};
use crate::error::Error;
use crate::potential::Potential;
use crate::solvers::{solve_backward, Channel, ScatteringSolution, Solver, SolverTag};
use crate::units::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<num_complex::Complex64> for ComplexValue {
    fn from(z: num_complex::Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmitResult {
    pub energy_ev: f64,
    #[serde(rename = "T")]
    pub transmission: f64,
    #[serde(rename = "R")]
    pub reflection: f64,
    #[serde(rename = "A")]
    pub a: ComplexValue,
    #[serde(rename = "B")]
    pub b: ComplexValue,
    #[serde(rename = "F")]
    pub f: ComplexValue,
    pub k_in: f64,
    pub k_out: f64,
    pub channel: Channel,
    pub solver: SolverTag,
    pub resolution: usize,
    pub low_resolution: bool,
}

impl From<&ScatteringSolution> for TransmitResult {
    fn from(s: &ScatteringSolution) -> Self {
        TransmitResult {
            energy_ev: s.energy,
            transmission: s.transmission,
            reflection: s.reflection,
            a: s.a.into(),
            b: s.b.into(),
            f: s.f.into(),
            k_in: s.k_in.value,
            k_out: s.k_out.value,
            channel: s.channel,
            solver: s.solver,
            resolution: s.resolution,
            low_resolution: s.low_resolution,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceResult {
    /// ħω of the matching untruncated well; None when the barrier is not a parabola.
    pub hbar_omega: Option<f64>,
    pub peaks: Vec<ResonancePeak>,
    pub curve: TransmissionCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavefunctionResult {
    pub energy_ev: f64,
    #[serde(rename = "T")]
    pub transmission: f64,
    pub x_nm: Vec<f64>,
    pub re_psi: Vec<f64>,
    pub im_psi: Vec<f64>,
    /// |ψ|² normalized to a maximum of 1.
    pub density: Vec<f64>,
    pub density_peaks_nm: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareCurve {
    pub solver: SolverTag,
    pub resolution: usize,
    #[serde(rename = "T")]
    pub transmission: Vec<f64>,
    /// max over the grid of |T − T_reference|
    pub max_abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareResult {
    pub energies: Vec<f64>,
    pub reference: CompareCurve,
    pub curves: Vec<CompareCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenResult {
    pub state: BoundState,
    pub hbar_omega: f64,
    /// (n + ½)ħω above the well bottom
    pub harmonic_energy: f64,
    pub density_peaks_nm: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Transmit(TransmitResult),
    Sweep(TransmissionCurve),
    Resonances(ResonanceResult),
    Wavefunction(WavefunctionResult),
    Compare(CompareResult),
    Eigen(EigenResult),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub failures: Vec<PointFailure>,
    pub warnings: Vec<String>,
}

pub fn execute(cfg: &RunConfig, units: &UnitSystem) -> Result<(Outcome, Diagnostics), CliError> {
    let p = cfg.potential.load()?;
    let mut diag = Diagnostics::default();
    let outcome = match cfg.command {
        Command::Transmit => {
            let e = cfg.energy.expect("validated");
            let s = cfg.solver().solve(&p, e, units)?;
            if s.low_resolution {
                diag.warnings.push(format!("only {} steps: result is low resolution", s.resolution));
            }
            if s.channel == Channel::Closed {
                diag.warnings.push("transmitted channel is closed (E <= V_right)".into());
            }
            Outcome::Transmit((&s).into())
        }
        Command::Sweep => {
            let r = cfg.range.expect("validated");
            let c = sweep(&p, r.emin, r.emax, r.points, &cfg.solver(), units)?;
            diag.failures = c.failures.clone();
            Outcome::Sweep(c)
        }
        Command::Resonances => {
            let r = cfg.range.expect("validated");
            let solver = cfg.solver();
            let scan = scan_resonances(&p, r.emin, r.emax, r.points, &solver, units, cfg.refine_iters)?;
            diag.failures = scan.curve.failures.clone();
            let hbar_omega = ParabolicWell::from_potential(&p).ok().and_then(|w| w.hbar_omega(units).ok());
            let peaks = match hbar_omega {
                Some(hw) => compare_to_harmonic(&scan.peaks, hw)?,
                None => {
                    diag.warnings.push("barrier is not a parabola: no harmonic comparison".into());
                    scan.peaks
                }
            };
            Outcome::Resonances(ResonanceResult { hbar_omega, peaks, curve: scan.curve })
        }
        Command::Wavefunction => {
            let e = cfg.energy.expect("validated");
            let s = solve_backward(&p, e, &cfg.integration(cfg.steps).recording(), units)?;
            let t = s.trajectory.as_ref().ok_or_else(|| CliError::Numerical(Error::Degenerate(
                "closed channel: no transmitted wave to integrate from".into(),
            )))?;
            let density = density_profile(t)?;
            Outcome::Wavefunction(WavefunctionResult {
                energy_ev: e,
                transmission: s.transmission,
                density_peaks_nm: density_peaks(&t.xs, &density),
                x_nm: t.xs.clone(),
                re_psi: t.psi.iter().map(|z| z.re).collect(),
                im_psi: t.psi.iter().map(|z| z.im).collect(),
                density,
            })
        }
        Command::Compare => Outcome::Compare(compare(cfg, &p, units, &mut diag)?),
        Command::Eigen => {
            let well = ParabolicWell::from_potential(&p)
                .map_err(|e| CliError::Config(format!("`eigen` needs a parabolic barrier: {e}")))?;
            let state = shoot_level(&well, cfg.level, units)?;
            let hbar_omega = well.hbar_omega(units)?;
            Outcome::Eigen(EigenResult {
                harmonic_energy: well.level(cfg.level, units)?,
                hbar_omega,
                density_peaks_nm: density_peaks(&state.xs, &state.density),
                state,
            })
        }
    };
    Ok((outcome, diag))
}

fn compare(cfg: &RunConfig, p: &Potential, units: &UnitSystem, diag: &mut Diagnostics) -> Result<CompareResult, CliError> {
    let r = cfg.range.expect("validated");
    let run = |solver: Solver, diag: &mut Diagnostics| -> Result<TransmissionCurve, CliError> {
        let c = sweep(p, r.emin, r.emax, r.points, &solver, units)?;
        diag.failures.extend(c.failures.iter().cloned());
        Ok(c)
    };
    let reference = run(Solver::Backward(cfg.integration(cfg.reference_steps)), diag)?;
    let max_diff = |t: &[f64]| {
        t.iter()
            .zip(&reference.transmission)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, |m, d| if d.is_nan() || m.is_nan() { f64::NAN } else { m.max(d) })
    };
    let mut curves = Vec::new();
    for &steps in &cfg.compare_steps {
        let settings = cfg.integration(steps);
        if settings.is_low_resolution() {
            diag.warnings.push(format!("backward steps={steps} is low resolution"));
        }
        let c = run(Solver::Backward(settings), diag)?;
        curves.push(CompareCurve {
            solver: SolverTag::Backward,
            resolution: steps,
            max_abs_diff: max_diff(&c.transmission),
            transmission: c.transmission,
        });
    }
    for &slices in &cfg.compare_slices {
        let c = run(Solver::TransferMatrix { slices }, diag)?;
        curves.push(CompareCurve {
            solver: SolverTag::TransferMatrix,
            resolution: slices,
            max_abs_diff: max_diff(&c.transmission),
            transmission: c.transmission,
        });
    }
    Ok(CompareResult {
        energies: reference.energies.clone(),
        reference: CompareCurve {
            solver: SolverTag::Backward,
            resolution: cfg.reference_steps,
            max_abs_diff: 0.0,
            transmission: reference.transmission,
        },
        curves,
    })
}
