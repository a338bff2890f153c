use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::solvers::{Solver, SolverTag};
use crate::units::UnitSystem;

/// A grid point whose solve failed. Its entry in the curve holds NaN.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub index: usize,
    pub energy: f64,
    pub message: String,
}

/// T sampled on a strictly increasing energy grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransmissionCurve {
    pub energies: Vec<f64>,
    pub transmission: Vec<f64>,
    pub solver: SolverTag,
    pub resolution: usize,
    pub failures: Vec<PointFailure>,
}

impl TransmissionCurve {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Inserts extra samples, keeping the grid strictly increasing.
    /// Energies already present are skipped.
    pub fn merge(&mut self, other: TransmissionCurve) {
        let mut points: Vec<(f64, f64)> = self
            .energies
            .iter()
            .copied()
            .zip(self.transmission.iter().copied())
            .chain(other.energies.iter().copied().zip(other.transmission.iter().copied()))
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        points.dedup_by(|a, b| a.0 == b.0);
        self.energies = points.iter().map(|p| p.0).collect();
        self.transmission = points.iter().map(|p| p.1).collect();
        self.failures.extend(other.failures);
        self.failures.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        self.failures.dedup_by(|a, b| a.energy == b.energy);
        let energies = &self.energies;
        for f in &mut self.failures {
            f.index = energies.partition_point(|&e| e < f.energy);
        }
    }
}

/// `n_points` uniformly spaced energies from `e_min` to `e_max` inclusive.
pub fn energy_grid(e_min: f64, e_max: f64, n_points: usize) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(Error::InvalidArgument("a sweep needs at least 2 points".into()));
    }
    if !(e_min.is_finite() && e_max.is_finite() && e_max > e_min) {
        return Err(Error::InvalidArgument(format!("invalid energy range ({e_min}, {e_max})")));
    }
    let span = e_max - e_min;
    let last = (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| if i + 1 == n_points { e_max } else { e_min + span * (i as f64 / last) })
        .collect())
}

/// One solve per grid point, run on the current rayon pool. Results are in
/// grid order regardless of completion order.
pub fn sweep(
    p: &Potential,
    e_min: f64,
    e_max: f64,
    n_points: usize,
    solver: &Solver,
    units: &UnitSystem,
) -> Result<TransmissionCurve> {
    check_range(p, e_min)?;
    let energies = energy_grid(e_min, e_max, n_points)?;
    Ok(sweep_energies(p, &energies, solver, units, true))
}

/// Same as [`sweep`] on the calling thread.
pub fn sweep_serial(
    p: &Potential,
    e_min: f64,
    e_max: f64,
    n_points: usize,
    solver: &Solver,
    units: &UnitSystem,
) -> Result<TransmissionCurve> {
    check_range(p, e_min)?;
    let energies = energy_grid(e_min, e_max, n_points)?;
    Ok(sweep_energies(p, &energies, solver, units, false))
}

fn check_range(p: &Potential, e_min: f64) -> Result<()> {
    if !(e_min > p.v_left()) {
        return Err(Error::InvalidArgument(format!(
            "sweep must start above V_left = {} eV, got {e_min}",
            p.v_left()
        )));
    }
    Ok(())
}

/// Solves at arbitrary energies (assumed increasing). Failures are recorded,
/// not propagated.
pub fn sweep_energies(
    p: &Potential,
    energies: &[f64],
    solver: &Solver,
    units: &UnitSystem,
    parallel: bool,
) -> TransmissionCurve {
    let solve = |e: &f64| solver.solve(p, *e, units).map(|s| s.transmission);
    let results: Vec<Result<f64>> = if parallel {
        energies.par_iter().map(solve).collect()
    } else {
        energies.iter().map(solve).collect()
    };
    let mut transmission = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok(t) => transmission.push(t),
            Err(e) => {
                transmission.push(f64::NAN);
                failures.push(PointFailure {
                    index,
                    energy: energies[index],
                    message: e.to_string(),
                });
            }
        }
    }
    TransmissionCurve {
        energies: energies.to_vec(),
        transmission,
        solver: solver.tag(),
        resolution: solver.resolution(),
        failures,
    }
}
