//! Transmission probabilities and in-barrier wavefunctions for arbitrary
//! one-dimensional potential barriers.
//!
//! The primary solver fixes the transmitted wave `F e^{ik x}` (F = 1) at the
//! far edge of the barrier and integrates the Schrödinger equation backwards
//! to x = 0, where ψ(0) and ψ'(0) give the incident and reflected amplitudes.
//! A transfer-matrix solver and a WKB estimate are provided for comparison,
//! along with energy sweeps and resonance analysis.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod integrate;
pub mod potential;
pub mod solvers;
pub mod units;

pub use error::{Error, Result};
pub use integrate::{integrate_backward, initial_conditions, IntegrationSettings, Method, Trajectory};
pub use potential::{builtin_parabolic, parse_potential, render_potential, Potential, Segment, SegmentForm};
pub use solvers::{
    solve_backward, solve_transfer_matrix, solve_wkb, Channel, ScatteringSolution, Solver, SolverTag,
};
pub use units::{wavevector, Regime, UnitSystem, WaveNumber};
