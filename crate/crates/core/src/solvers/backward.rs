use num_complex::Complex64;

use super::{exterior_waves, Channel, ScatteringSolution, SolverTag};
use crate::error::Result;
use crate::integrate::{integrate_backward, IntegrationSettings};
use crate::potential::Potential;
use crate::units::UnitSystem;

/// Transmission by integrating from the transmitted side back to x = 0.
///
/// With F = 1 fixed at x = L, matching `ψ(0) = A + B` and
/// `ψ'(0) = ik_I (A − B)` gives
/// `T = (k_III/k_I) · 4 / |ψ(0) − iψ'(0)/k_I|²`.
pub fn solve_backward(
    p: &Potential,
    energy: f64,
    settings: &IntegrationSettings,
    units: &UnitSystem,
) -> Result<ScatteringSolution> {
    let (k_in, k_out, open) = exterior_waves(p, energy, units)?;
    if !open {
        let mut closed = ScatteringSolution::closed(energy, k_in, k_out, SolverTag::Backward, settings.steps);
        closed.low_resolution = settings.is_low_resolution();
        return Ok(closed);
    }
    let trajectory = integrate_backward(p, energy, settings, units)?;
    let (psi0, dpsi0) = trajectory.start();

    let slope_term = dpsi0 / (Complex64::i() * k_in.value);
    let a = (psi0 + slope_term) * 0.5;
    let b = (psi0 - slope_term) * 0.5;
    let incident = psi0 - Complex64::i() * dpsi0 / k_in.value;
    let transmission = k_out.value / k_in.value * 4.0 / incident.norm_sqr();
    let reflection = (b / a).norm_sqr();

    Ok(ScatteringSolution {
        energy,
        transmission,
        reflection,
        a,
        b,
        f: Complex64::new(1.0, 0.0),
        k_in,
        k_out,
        trajectory: settings.record_trajectory.then_some(trajectory),
        solver: SolverTag::Backward,
        resolution: settings.steps,
        channel: Channel::Open,
        low_resolution: settings.is_low_resolution(),
    })
}
