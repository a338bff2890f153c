//! Unit conventions and wavevectors.
//!
//! Energies are in eV and lengths in nm. The only mass-dependent quantity any
//! solver needs is the combination ħ²/2m, which turns the Schrödinger equation
//! into `ψ'' = (V − E) / (ħ²/2m) · ψ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact since the SI redefinition).
pub const HBAR_J_S: f64 = 1.054_571_817e-34;
/// Electron rest mass, kg (CODATA 2018).
pub const ELECTRON_MASS_KG: f64 = 9.109_383_701_5e-31;
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;

/// Particle mass expressed through ħ²/2m in eV·nm².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    hbar2_over_2m: f64,
    mass_label: String,
}

impl UnitSystem {
    /// Free electron: ħ²/2mₑ ≈ 0.0380998 eV·nm².
    pub fn electron() -> Self {
        let joule_m2 = HBAR_J_S * HBAR_J_S / (2.0 * ELECTRON_MASS_KG);
        UnitSystem {
            hbar2_over_2m: joule_m2 / ELEMENTARY_CHARGE_C * 1e18,
            mass_label: "electron".to_string(),
        }
    }

    /// A particle of mass `ratio · mₑ` (effective masses, muons, ...).
    pub fn with_mass_ratio(ratio: f64, label: impl Into<String>) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mass ratio must be positive, got {ratio}"
            )));
        }
        let electron = Self::electron();
        Self::new(electron.hbar2_over_2m / ratio, label)
    }

    pub fn new(hbar2_over_2m: f64, label: impl Into<String>) -> Result<Self> {
        if !(hbar2_over_2m.is_finite() && hbar2_over_2m > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "hbar^2/2m must be positive, got {hbar2_over_2m}"
            )));
        }
        Ok(UnitSystem {
            hbar2_over_2m,
            mass_label: label.into(),
        })
    }

    #[inline]
    pub fn hbar2_over_2m(&self) -> f64 {
        self.hbar2_over_2m
    }

    pub fn mass_label(&self) -> &str {
        &self.mass_label
    }

    /// Coefficient `g = (V − E) / (ħ²/2m)` of the equation `ψ'' = g ψ`, in nm⁻².
    #[inline]
    pub fn curvature_coefficient(&self, potential: f64, energy: f64) -> f64 {
        (potential - energy) / self.hbar2_over_2m
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::electron()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Propagating,
    Evanescent,
}

/// Magnitude of a wavevector (E ≥ V) or decay constant (E < V), in nm⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveNumber {
    pub value: f64,
    pub regime: Regime,
}

impl WaveNumber {
    pub fn is_propagating(&self) -> bool {
        self.regime == Regime::Propagating
    }
}

/// `k = sqrt(2m(E − V))/ħ` when `E ≥ V`, otherwise `κ = sqrt(2m(V − E))/ħ`.
///
/// Note the mass enters linearly: `k = sqrt((2m/ħ²)(E − V))`.
pub fn wavevector(energy: f64, potential: f64, units: &UnitSystem) -> WaveNumber {
    let kinetic = energy - potential;
    if kinetic >= 0.0 {
        WaveNumber {
            value: (kinetic / units.hbar2_over_2m).sqrt(),
            regime: Regime::Propagating,
        }
    } else {
        WaveNumber {
            value: (-kinetic / units.hbar2_over_2m).sqrt(),
            regime: Regime::Evanescent,
        }
    }
}
