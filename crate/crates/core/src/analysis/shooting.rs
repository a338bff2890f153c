use num_complex::Complex64;
use serde::Serialize;

use super::harmonic::{harmonic_level, harmonic_omega_from_parabola, oscillator_length};
use crate::error::{Error, Result};
use crate::integrate::{propagate, IntegrationSettings, Trajectory};
use crate::potential::{Potential, SegmentForm};
use crate::units::UnitSystem;

/// Eigenvalue tolerance of the bisection.
pub const EIGEN_TOLERANCE: f64 = 1e-8;
/// RK4 steps across the whole shooting domain.
pub const SHOOTING_STEPS: usize = 8000;
/// Domain half-width beyond the classical turning point of level n, in σ.
pub const TAIL_SIGMAS: f64 = 6.0;
const MAX_BISECTIONS: usize = 200;

/// The untruncated well `V = v_min + curvature·(x − center)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParabolicWell {
    pub v_min: f64,
    pub curvature: f64,
    pub center: f64,
}

impl ParabolicWell {
    pub fn new(v_min: f64, curvature: f64, center: f64) -> Result<Self> {
        if !(curvature > 0.0 && curvature.is_finite() && v_min.is_finite() && center.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "a well needs finite parameters and positive curvature, got {curvature}"
            )));
        }
        Ok(ParabolicWell { v_min, curvature, center })
    }

    /// Extends a barrier whose segments all carry the same upward quadratic.
    pub fn from_potential(p: &Potential) -> Result<Self> {
        let mut found: Option<&[f64]> = None;
        for seg in p.segments() {
            let c = match &seg.form {
                SegmentForm::Polynomial(c) if c.len() == 3 && c[2] > 0.0 => c.as_slice(),
                _ => return Err(Error::Degenerate("potential is not a single upward parabola".into())),
            };
            match found {
                Some(prev) if prev != c => {
                    return Err(Error::Degenerate("segments carry different parabolas".into()))
                }
                _ => found = Some(c),
            }
        }
        let c = found.ok_or_else(|| Error::Degenerate("potential has no segments".into()))?;
        let center = -c[1] / (2.0 * c[2]);
        Self::new(c[0] - c[2] * center * center, c[2], center)
    }

    pub fn value(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.v_min + self.curvature * d * d
    }

    pub fn hbar_omega(&self, units: &UnitSystem) -> Result<f64> {
        harmonic_omega_from_parabola(self.curvature, units)
    }

    /// Exact level n, measured from zero energy.
    pub fn level(&self, n: usize, units: &UnitSystem) -> Result<f64> {
        Ok(self.v_min + harmonic_level(n, self.hbar_omega(units)?))
    }

    /// E_n ± 0.4 ħω
    pub fn bracket(&self, n: usize, units: &UnitSystem) -> Result<(f64, f64)> {
        let hw = self.hbar_omega(units)?;
        let e = self.v_min + harmonic_level(n, hw);
        Ok((e - 0.4 * hw, e + 0.4 * hw))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundState {
    pub n: usize,
    pub energy: f64,
    pub xs: Vec<f64>,
    /// Real eigenfunction, scaled so that max |ψ| = 1.
    pub psi: Vec<f64>,
    /// ψ² normalized to a maximum of 1.
    pub density: Vec<f64>,
}

struct Domain {
    left: f64,
    right: f64,
}

fn domain(well: &ParabolicWell, n: usize, units: &UnitSystem) -> Result<Domain> {
    let sigma = oscillator_length(well.hbar_omega(units)?, units);
    let half = ((2 * n + 1) as f64).sqrt() * sigma + TAIL_SIGMAS * sigma;
    Ok(Domain {
        left: well.center - half,
        right: well.center + half,
    })
}

fn settings(steps: usize) -> IntegrationSettings {
    IntegrationSettings::rk4(steps).expect("positive step count")
}

/// Decaying data at an outer edge: ψ = 1, ψ' = ±κψ pointing into the well.
fn tail_start(well: &ParabolicWell, x: f64, energy: f64, inward: f64, units: &UnitSystem) -> (Complex64, Complex64) {
    let kappa = ((well.value(x) - energy).max(0.0) / units.hbar2_over_2m()).sqrt();
    (Complex64::new(1.0, 0.0), Complex64::new(inward * kappa, 0.0))
}

/// ψ at the right edge after integrating in from the left tail.
fn mismatch(well: &ParabolicWell, d: &Domain, energy: f64, units: &UnitSystem) -> Result<f64> {
    let g = |x: f64| units.curvature_coefficient(well.value(x), energy);
    let (psi0, dpsi0) = tail_start(well, d.left, energy, 1.0, units);
    let run = propagate(&g, d.left, d.right, &settings(SHOOTING_STEPS), psi0, dpsi0)?;
    Ok(run.psi[run.len() - 1].re)
}

/// Bisects the shooting mismatch inside `bracket` to [`EIGEN_TOLERANCE`] and
/// returns level n with its normalized density.
///
/// The eigenfunction is assembled from a left and a right tail solution
/// joined at the right classical turning point, which keeps the far tail
/// free of the exponentially growing component left over by the finite
/// eigenvalue tolerance.
pub fn shoot_eigenstate(
    well: &ParabolicWell,
    n: usize,
    bracket: (f64, f64),
    units: &UnitSystem,
) -> Result<BoundState> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty bracket ({lo}, {hi})")));
    }
    let d = domain(well, n, units)?;
    let mut f_lo = mismatch(well, &d, lo, units)?;
    let f_hi = mismatch(well, &d, hi, units)?;
    if f_lo == 0.0 {
        hi = lo;
    } else if f_hi == 0.0 {
        lo = hi;
    } else if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracketing { lo, hi });
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= EIGEN_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = mismatch(well, &d, mid, units)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let energy = 0.5 * (lo + hi);
    let (xs, psi) = eigenfunction(well, &d, energy, units)?;
    let nodes = count_nodes(&psi);
    if nodes != n {
        return Err(Error::Bracketing { lo: bracket.0, hi: bracket.1 });
    }
    let scale = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let psi: Vec<f64> = psi.iter().map(|v| v / scale).collect();
    let density = psi.iter().map(|v| v * v).collect();
    Ok(BoundState { n, energy, xs, psi, density })
}

/// Convenience wrapper bracketing level n at E_n ± 0.4 ħω.
pub fn shoot_level(well: &ParabolicWell, n: usize, units: &UnitSystem) -> Result<BoundState> {
    shoot_eigenstate(well, n, well.bracket(n, units)?, units)
}

fn eigenfunction(well: &ParabolicWell, d: &Domain, energy: f64, units: &UnitSystem) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = (d.right - d.left) / SHOOTING_STEPS as f64;
    let turning = well.center + ((energy - well.v_min).max(0.0) / well.curvature).sqrt();
    let m = (((turning - d.left) / h).round() as usize).clamp(1, SHOOTING_STEPS - 1);
    let x_m = d.left + h * m as f64;
    let g = |x: f64| units.curvature_coefficient(well.value(x), energy);

    let (p0, dp0) = tail_start(well, d.left, energy, 1.0, units);
    let left: Trajectory = propagate(&g, d.left, x_m, &settings(m).recording(), p0, dp0)?;
    let (q0, dq0) = tail_start(well, d.right, energy, -1.0, units);
    let right: Trajectory = propagate(&g, d.right, x_m, &settings(SHOOTING_STEPS - m).recording(), q0, dq0)?;

    let join_left = left.psi[left.len() - 1].re;
    let join_right = right.psi[right.len() - 1].re;
    if join_right == 0.0 {
        return Err(Error::Degenerate("right solution vanishes at the matching point".into()));
    }
    let ratio = join_left / join_right;
    let mut xs = left.xs.clone();
    let mut psi: Vec<f64> = left.psi.iter().map(|z| z.re).collect();
    // right run is in descending x; skip its copy of the matching point
    for i in (0..right.len() - 1).rev() {
        xs.push(right.xs[i]);
        psi.push(right.psi[i].re * ratio);
    }
    Ok((xs, psi))
}

/// Sign changes of ψ, ignoring samples negligible next to the maximum.
pub fn count_nodes(psi: &[f64]) -> usize {
    let max = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-8 * max;
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &v in psi {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            nodes += 1;
        }
        last = v;
    }
    nodes
}
