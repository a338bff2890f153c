use num_complex::Complex64;

use super::{exterior_waves, Channel, ScatteringSolution, SolverTag};
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::units::UnitSystem;

/// |E − V| below which a slab uses the linear solution ψ = a + b·x.
pub const FLAT_SLAB_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Mat2 {
    m: [[Complex64; 2]; 2],
}

impl Mat2 {
    #[cfg(test)]
    fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mat2 { m: [[one, zero], [zero, one]] }
    }

    fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.m, &o.m);
        Mat2 {
            m: [
                [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
                [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
            ],
        }
    }

    fn inverse(&self) -> Mat2 {
        let a = &self.m;
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        Mat2 {
            m: [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]],
        }
    }
}

/// Solution basis of a region with constant V.
#[derive(Debug, Clone, Copy)]
enum Basis {
    /// `a e^{ikx} + b e^{−ikx}`; k is imaginary in forbidden slabs.
    Waves(Complex64),
    /// `a + b x` when E = V.
    Linear,
}

impl Basis {
    fn for_level(energy: f64, v: f64, units: &UnitSystem) -> Basis {
        let kinetic = energy - v;
        if kinetic.abs() < FLAT_SLAB_THRESHOLD {
            Basis::Linear
        } else {
            Basis::Waves(Complex64::new(kinetic / units.hbar2_over_2m(), 0.0).sqrt())
        }
    }

    /// Maps coefficients (a, b) to (ψ, ψ') at local coordinate x.
    fn matrix(&self, x: f64) -> Mat2 {
        match *self {
            Basis::Waves(k) => {
                let i = Complex64::i();
                let forward = (i * k * x).exp();
                let backward = (-i * k * x).exp();
                Mat2 {
                    m: [[forward, backward], [i * k * forward, -i * k * backward]],
                }
            }
            Basis::Linear => Mat2 {
                m: [
                    [Complex64::new(1.0, 0.0), Complex64::new(x, 0.0)],
                    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                ],
            },
        }
    }
}

/// Transmission through `slices` uniform constant-V slabs, each taking V at its
/// midpoint. ψ and ψ' are continuous at every slab boundary; the composed
/// matrix maps the transmitted amplitudes (F, 0) back to (A, B).
pub fn solve_transfer_matrix(p: &Potential, energy: f64, slices: usize, units: &UnitSystem) -> Result<ScatteringSolution> {
    if slices == 0 {
        return Err(Error::InvalidArgument("slices must be at least 1".into()));
    }
    let (k_in, k_out, open) = exterior_waves(p, energy, units)?;
    if !open {
        return Ok(ScatteringSolution::closed(energy, k_in, k_out, SolverTag::TransferMatrix, slices));
    }
    let length = p.length();
    let width = length / slices as f64;

    let incident = Basis::for_level(energy, p.v_left(), units);
    let mut total = incident.matrix(0.0).inverse();
    for j in 0..slices {
        let mid = length * (j as f64 + 0.5) / slices as f64;
        let slab = Basis::for_level(energy, p.value(mid), units);
        let across = slab.matrix(0.0).mul(&slab.matrix(width).inverse());
        total = total.mul(&across);
    }
    let transmitted = Basis::for_level(energy, p.v_right(), units);
    total = total.mul(&transmitted.matrix(0.0));

    // Region III written as F' e^{ik(x−L)} with F' = F e^{ikL}, F = 1.
    let f = Complex64::new(1.0, 0.0);
    let f_local = Complex64::from_polar(1.0, k_out.value * length);
    let a = total.m[0][0] * f_local;
    let b = total.m[1][0] * f_local;
    if !(a.norm().is_finite() && b.norm().is_finite()) {
        return Err(Error::Divergence { x: 0.0 });
    }
    let transmission = k_out.value / k_in.value * f.norm_sqr() / a.norm_sqr();
    let reflection = (b / a).norm_sqr();

    Ok(ScatteringSolution {
        energy,
        transmission,
        reflection,
        a,
        b,
        f,
        k_in,
        k_out,
        trajectory: None,
        solver: SolverTag::TransferMatrix,
        resolution: slices,
        channel: Channel::Open,
        low_resolution: false,
    })
}
