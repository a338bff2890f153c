//! Energy sweeps, resonance search, the harmonic-oscillator comparison and
//! wavefunction post-processing.

mod harmonic;
mod resonance;
mod shooting;
mod sweep;
mod wavefunction;

pub use harmonic::{harmonic_level, harmonic_omega_from_parabola, oscillator_length};
pub use resonance::{
    compare_to_harmonic, find_resonances, fine_scan_candidates, golden_section_max, local_maxima, scan_resonances,
    ResonancePeak, ResonanceScan, DEFAULT_REFINE_ITERS, FINE_SCAN_FACTOR, MEDIAN_FACTOR, PEAK_ENERGY_TOLERANCE,
};
pub use shooting::{
    count_nodes, shoot_eigenstate, shoot_level, BoundState, ParabolicWell, EIGEN_TOLERANCE, SHOOTING_STEPS,
    TAIL_SIGMAS,
};
pub use sweep::{energy_grid, sweep, sweep_energies, sweep_serial, PointFailure, TransmissionCurve};
pub use wavefunction::{density_peaks, density_profile, normalize_max};
