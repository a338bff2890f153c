//! Python bindings: potentials, the three solvers, sweeps, resonance search
//! and the parabolic-well eigensolver.

use barrierscope::analysis::{self, ParabolicWell};
use barrierscope::{Error, IntegrationSettings, Method, Solver, UnitSystem};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn units() -> UnitSystem {
    UnitSystem::electron()
}

fn solver_for(kind: &str, resolution: Option<usize>, method: &str) -> PyResult<Solver> {
    Ok(match kind {
        "backward" => {
            let m: Method = method.parse().map_err(to_py)?;
            Solver::Backward(IntegrationSettings::new(m, resolution.unwrap_or(2000)).map_err(to_py)?)
        }
        "tmm" | "transfer_matrix" => Solver::TransferMatrix {
            slices: resolution.unwrap_or(barrierscope::solvers::DEFAULT_SLICES),
        },
        "wkb" => Solver::Wkb {
            quad_points: resolution.unwrap_or(barrierscope::solvers::DEFAULT_QUAD_POINTS),
        },
        other => return Err(PyValueError::new_err(format!("unknown solver `{other}` (backward, tmm, wkb)"))),
    })
}

/// A barrier on [0, L] with constant levels outside.
#[pyclass(name = "Potential", frozen, module = "barrierscope")]
struct PyPotential {
    inner: barrierscope::Potential,
}

#[pymethods]
impl PyPotential {
    /// Parses the potential text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyPotential { inner: barrierscope::parse_potential(text).map_err(to_py)? })
    }

    #[staticmethod]
    #[pyo3(signature = (height=1.0, width=1.0))]
    fn square(height: f64, width: f64) -> PyResult<Self> {
        Ok(PyPotential { inner: barrierscope::Potential::square(height, width).map_err(to_py)? })
    }

    #[staticmethod]
    #[pyo3(signature = (height=10.0, width=2.0))]
    fn parabola(height: f64, width: f64) -> PyResult<Self> {
        Ok(PyPotential { inner: barrierscope::Potential::parabola(height, width).map_err(to_py)? })
    }

    #[staticmethod]
    fn double_barrier(height: f64, barrier: f64, well: f64) -> PyResult<Self> {
        Ok(PyPotential { inner: barrierscope::Potential::double_barrier(height, barrier, well).map_err(to_py)? })
    }

    #[staticmethod]
    fn arbitrary() -> Self {
        PyPotential { inner: barrierscope::Potential::arbitrary() }
    }

    fn with_exterior(&self, v_left: f64, v_right: f64) -> PyResult<Self> {
        Ok(PyPotential { inner: self.inner.clone().with_exterior(v_left, v_right).map_err(to_py)? })
    }

    /// V(x) in eV; raises ValueError outside [0, L].
    fn __call__(&self, x: f64) -> PyResult<f64> {
        self.inner.evaluate(x).map_err(to_py)
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    #[getter]
    fn v_left(&self) -> f64 {
        self.inner.v_left()
    }

    #[getter]
    fn v_right(&self) -> f64 {
        self.inner.v_right()
    }

    fn render(&self) -> String {
        barrierscope::render_potential(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Potential(length={}, v_left={}, v_right={}, segments={})",
            self.inner.length(),
            self.inner.v_left(),
            self.inner.v_right(),
            self.inner.segments().len()
        )
    }
}

/// Result of a single-energy solve.
#[pyclass(name = "Solution", frozen, get_all, module = "barrierscope")]
struct PySolution {
    energy: f64,
    transmission: f64,
    reflection: f64,
    a: Complex64,
    b: Complex64,
    k_in: f64,
    k_out: f64,
    solver: String,
    resolution: usize,
    closed: bool,
    low_resolution: bool,
    /// x, ψ and ψ' when a trajectory was recorded, else None.
    trajectory: Option<(Vec<f64>, Vec<Complex64>, Vec<Complex64>)>,
}

#[pymethods]
impl PySolution {
    fn __repr__(&self) -> String {
        format!("Solution(energy={}, T={}, R={}, solver={})", self.energy, self.transmission, self.reflection, self.solver)
    }
}

impl From<barrierscope::ScatteringSolution> for PySolution {
    fn from(s: barrierscope::ScatteringSolution) -> Self {
        PySolution {
            energy: s.energy,
            transmission: s.transmission,
            reflection: s.reflection,
            a: s.a,
            b: s.b,
            k_in: s.k_in.value,
            k_out: s.k_out.value,
            solver: s.solver.to_string(),
            resolution: s.resolution,
            closed: s.channel == barrierscope::Channel::Closed,
            low_resolution: s.low_resolution,
            trajectory: s.trajectory.map(|t| (t.xs, t.psi, t.dpsi)),
        }
    }
}

/// Transmission by integrating backwards from the transmitted wave.
#[pyfunction]
#[pyo3(signature = (potential, energy, steps=2000, method="rk4", record=false))]
fn solve_backward(potential: &PyPotential, energy: f64, steps: usize, method: &str, record: bool) -> PyResult<PySolution> {
    let m: Method = method.parse().map_err(to_py)?;
    let mut settings = IntegrationSettings::new(m, steps).map_err(to_py)?;
    settings.record_trajectory = record;
    barrierscope::solve_backward(&potential.inner, energy, &settings, &units())
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (potential, energy, slices=1000))]
fn solve_transfer_matrix(potential: &PyPotential, energy: f64, slices: usize) -> PyResult<PySolution> {
    barrierscope::solve_transfer_matrix(&potential.inner, energy, slices, &units())
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (potential, energy, quad_points=1000))]
fn solve_wkb(potential: &PyPotential, energy: f64, quad_points: usize) -> PyResult<PySolution> {
    barrierscope::solve_wkb(&potential.inner, energy, quad_points, &units())
        .map(Into::into)
        .map_err(to_py)
}

/// Uniform sweep; returns (energies, T). Failed points are NaN.
#[pyfunction]
#[pyo3(signature = (potential, emin, emax, points, solver="backward", resolution=None, method="rk4"))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    py: Python<'_>,
    potential: &PyPotential,
    emin: f64,
    emax: f64,
    points: usize,
    solver: &str,
    resolution: Option<usize>,
    method: &str,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let s = solver_for(solver, resolution, method)?;
    let p = &potential.inner;
    let c = py.detach(|| analysis::sweep(p, emin, emax, points, &s, &units())).map_err(to_py)?;
    Ok((c.energies, c.transmission))
}

#[pyclass(name = "ResonancePeak", frozen, get_all, module = "barrierscope")]
struct PyPeak {
    energy: f64,
    transmission: f64,
    fwhm: Option<f64>,
    n: Option<usize>,
    e_eigen: Option<f64>,
    deviation: Option<f64>,
}

#[pymethods]
impl PyPeak {
    fn __repr__(&self) -> String {
        format!("ResonancePeak(n={:?}, energy={}, T={})", self.n, self.energy, self.transmission)
    }
}

/// Coarse sweep, fine scan around candidates and golden-section refinement.
/// Peaks are matched to (n + ½)ħω when `hbar_omega` is given.
#[pyfunction]
#[pyo3(signature = (potential, emin, emax, points=2000, hbar_omega=None, solver="backward", resolution=None, method="rk4"))]
#[allow(clippy::too_many_arguments)]
fn resonances(
    py: Python<'_>,
    potential: &PyPotential,
    emin: f64,
    emax: f64,
    points: usize,
    hbar_omega: Option<f64>,
    solver: &str,
    resolution: Option<usize>,
    method: &str,
) -> PyResult<Vec<PyPeak>> {
    let s = solver_for(solver, resolution, method)?;
    let p = &potential.inner;
    let scan = py
        .detach(|| analysis::scan_resonances(p, emin, emax, points, &s, &units(), analysis::DEFAULT_REFINE_ITERS))
        .map_err(to_py)?;
    let peaks = match hbar_omega {
        Some(hw) => analysis::compare_to_harmonic(&scan.peaks, hw).map_err(to_py)?,
        None => scan.peaks,
    };
    Ok(peaks
        .into_iter()
        .map(|p| PyPeak {
            energy: p.energy,
            transmission: p.transmission,
            fwhm: p.fwhm,
            n: p.n_match,
            e_eigen: p.e_eigen,
            deviation: p.deviation,
        })
        .collect())
}

/// ħω of V = curvature·(x − x₀)² in eV.
#[pyfunction]
fn harmonic_omega_from_parabola(curvature: f64) -> PyResult<f64> {
    analysis::harmonic_omega_from_parabola(curvature, &units()).map_err(to_py)
}

#[pyclass(name = "BoundState", frozen, get_all, module = "barrierscope")]
struct PyBoundState {
    n: usize,
    energy: f64,
    x: Vec<f64>,
    psi: Vec<f64>,
    density: Vec<f64>,
}

/// Level n of the untruncated well v_min + curvature·(x − center)², by
/// shooting inside (n + ½)ħω ± 0.4ħω unless a bracket is given.
#[pyfunction]
#[pyo3(signature = (curvature, n, center=0.0, v_min=0.0, bracket=None))]
fn shoot_eigenstate(
    curvature: f64,
    n: usize,
    center: f64,
    v_min: f64,
    bracket: Option<(f64, f64)>,
) -> PyResult<PyBoundState> {
    let u = units();
    let well = ParabolicWell::new(v_min, curvature, center).map_err(to_py)?;
    let bracket = match bracket {
        Some(b) => b,
        None => well.bracket(n, &u).map_err(to_py)?,
    };
    let s = analysis::shoot_eigenstate(&well, n, bracket, &u).map_err(to_py)?;
    Ok(PyBoundState {
        n: s.n,
        energy: s.energy,
        x: s.xs,
        psi: s.psi,
        density: s.density,
    })
}

#[pymodule(name = "barrierscope")]
mod module {
    #[pymodule_export]
    use super::{
        harmonic_omega_from_parabola, resonances, shoot_eigenstate, solve_backward, solve_transfer_matrix, solve_wkb,
        sweep, PyBoundState, PyPeak, PyPotential, PySolution,
    };
}
