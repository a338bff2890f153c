use crate::error::{Error, Result};
use crate::units::UnitSystem;

/// ħω of the oscillator `V = curvature·(x − x₀)²`, i.e. ½mω² = curvature.
pub fn harmonic_omega_from_parabola(curvature: f64, units: &UnitSystem) -> Result<f64> {
    if !(curvature > 0.0 && curvature.is_finite()) {
        return Err(Error::InvalidArgument(format!("curvature must be positive, got {curvature} eV/nm^2")));
    }
    Ok((4.0 * curvature * units.hbar2_over_2m()).sqrt())
}

/// E_n = (n + ½)ħω
pub fn harmonic_level(n: usize, hbar_omega: f64) -> f64 {
    (n as f64 + 0.5) * hbar_omega
}

/// Oscillator length σ = sqrt(ħ/(mω)).
pub fn oscillator_length(hbar_omega: f64, units: &UnitSystem) -> f64 {
    (2.0 * units.hbar2_over_2m() / hbar_omega).sqrt()
}
