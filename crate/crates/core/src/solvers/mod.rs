//! Transmission solvers.
//!
//! All three produce a [`ScatteringSolution`] for the geometry
//! `ψ_I = A e^{ik_I x} + B e^{−ik_I x}` (x < 0) and `ψ_III = F e^{ik_III x}` (x > L),
//! with `T = (k_III/k_I) |F/A|²` and `R = |B/A|²`.

mod backward;
mod transfer_matrix;
mod wkb;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use backward::solve_backward;
pub use transfer_matrix::solve_transfer_matrix;
pub use wkb::{forbidden_intervals, solve_wkb, ForbiddenInterval};

use crate::error::{Error, Result};
use crate::integrate::{IntegrationSettings, Trajectory};
use crate::potential::Potential;
use crate::units::{wavevector, UnitSystem, WaveNumber};

/// Default number of transfer-matrix slices.
pub const DEFAULT_SLICES: usize = 1000;
/// Default number of Simpson panels per forbidden interval.
pub const DEFAULT_QUAD_POINTS: usize = 1000;
/// Slack allowed on 0 ≤ T, R ≤ 1 and T + R = 1 at default resolution.
pub const PROBABILITY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverTag {
    Backward,
    TransferMatrix,
    Wkb,
}

impl std::fmt::Display for SolverTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverTag::Backward => "backward",
            SolverTag::TransferMatrix => "transfer_matrix",
            SolverTag::Wkb => "wkb",
        })
    }
}

/// Whether the transmitted region supports a propagating wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Open,
    /// E ≤ V_right: nothing is transmitted, T is defined as 0.
    Closed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSolution {
    pub energy: f64,
    pub transmission: f64,
    pub reflection: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub f: Complex64,
    pub k_in: WaveNumber,
    pub k_out: WaveNumber,
    pub trajectory: Option<Trajectory>,
    pub solver: SolverTag,
    /// Steps, slices or quadrature panels, depending on the solver.
    pub resolution: usize,
    pub channel: Channel,
    pub low_resolution: bool,
}

impl ScatteringSolution {
    /// T computed directly from the amplitudes, `(k_out/k_in) |F|²/|A|²`.
    pub fn flux_transmission(&self) -> f64 {
        self.k_out.value * self.f.norm_sqr() / (self.k_in.value * self.a.norm_sqr())
    }

    pub(crate) fn closed(energy: f64, k_in: WaveNumber, k_out: WaveNumber, solver: SolverTag, resolution: usize) -> Self {
        // Total reflection; the phase of B is not computed.
        ScatteringSolution {
            energy,
            transmission: 0.0,
            reflection: 1.0,
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(-1.0, 0.0),
            f: Complex64::new(0.0, 0.0),
            k_in,
            k_out,
            trajectory: None,
            solver,
            resolution,
            channel: Channel::Closed,
            low_resolution: false,
        }
    }
}

/// Incident and transmitted wavenumbers, and whether the transmitted channel is open.
pub(crate) fn exterior_waves(
    p: &Potential,
    energy: f64,
    units: &UnitSystem,
) -> Result<(WaveNumber, WaveNumber, bool)> {
    if !energy.is_finite() {
        return Err(Error::InvalidArgument(format!("energy must be finite, got {energy}")));
    }
    if !(energy > p.v_left()) {
        return Err(Error::InvalidIncidence {
            energy,
            v_left: p.v_left(),
        });
    }
    let k_in = wavevector(energy, p.v_left(), units);
    let k_out = wavevector(energy, p.v_right(), units);
    let open = energy > p.v_right();
    Ok((k_in, k_out, open))
}

/// A solver together with its resolution parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "snake_case")]
pub enum Solver {
    Backward(IntegrationSettings),
    TransferMatrix { slices: usize },
    Wkb { quad_points: usize },
}

impl Solver {
    pub fn solve(&self, p: &Potential, energy: f64, units: &UnitSystem) -> Result<ScatteringSolution> {
        match self {
            Solver::Backward(s) => solve_backward(p, energy, s, units),
            Solver::TransferMatrix { slices } => solve_transfer_matrix(p, energy, *slices, units),
            Solver::Wkb { quad_points } => solve_wkb(p, energy, *quad_points, units),
        }
    }

    pub fn tag(&self) -> SolverTag {
        match self {
            Solver::Backward(_) => SolverTag::Backward,
            Solver::TransferMatrix { .. } => SolverTag::TransferMatrix,
            Solver::Wkb { .. } => SolverTag::Wkb,
        }
    }

    pub fn resolution(&self) -> usize {
        match self {
            Solver::Backward(s) => s.steps,
            Solver::TransferMatrix { slices } => *slices,
            Solver::Wkb { quad_points } => *quad_points,
        }
    }
}

impl Default for Solver {
    fn default() -> Self {
        Solver::Backward(IntegrationSettings::default())
    }
}
