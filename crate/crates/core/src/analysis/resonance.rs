use std::collections::BTreeSet;

use serde::Serialize;

use super::sweep::{sweep, sweep_energies, TransmissionCurve};
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::solvers::Solver;
use crate::units::UnitSystem;

/// Guaranteed energy accuracy of a refined peak.
pub const PEAK_ENERGY_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_REFINE_ITERS: usize = 100;
/// Extra density of the fine scan around candidate peaks.
pub const FINE_SCAN_FACTOR: usize = 100;
/// A sample is a fine-scan candidate when T exceeds this multiple of the local median.
pub const MEDIAN_FACTOR: f64 = 10.0;
const MEDIAN_HALF_WINDOW: usize = 5;
const HALF_MAX_BISECTIONS: usize = 60;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonancePeak {
    pub energy: f64,
    pub transmission: f64,
    /// None when a half-maximum crossing is not found before the curve edge
    /// or a neighbouring peak.
    pub fwhm: Option<f64>,
    pub n_match: Option<usize>,
    pub e_eigen: Option<f64>,
    /// (E_peak − E_eigen) / E_eigen
    pub deviation: Option<f64>,
}

/// Indices of interior local maxima by the 3-point test. A plateau counts
/// once, at its leftmost sample. NaN samples never form or bound a maximum.
pub fn local_maxima(t: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    if t.len() < 3 {
        return out;
    }
    let mut i = 1;
    while i + 1 < t.len() {
        if t[i].is_nan() || t[i - 1].is_nan() || !(t[i] > t[i - 1]) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < t.len() && t[j + 1] == t[i] {
            j += 1;
        }
        if j + 1 < t.len() && t[j + 1] < t[i] {
            out.push(i);
        }
        i = j + 1;
    }
    out
}

/// Golden-section search for the maximum of `f` on [a, b]. Failed
/// evaluations (NaN) lose every comparison.
pub fn golden_section_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, max_iters: usize) -> (f64, f64) {
    let score = |x: f64| {
        let v = f(x);
        if v.is_nan() { f64::NEG_INFINITY } else { v }
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (score(c), score(d));
    for _ in 0..max_iters {
        if b - a <= 4.0 * f64::EPSILON * b.abs().max(a.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = score(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = score(d);
        }
    }
    if fc >= fd { (c, fc) } else { (d, fd) }
}

/// Locates and refines the peaks of a sampled curve with fresh solves.
///
/// Each grid maximum is refined by golden-section search between its two
/// neighbours; if refinement fails to beat the grid value the grid sample is
/// kept. The half-maximum crossings are bracketed on the curve and then
/// bisected with the solver, so widths far below the grid spacing are resolved.
pub fn find_resonances(
    curve: &TransmissionCurve,
    refine_iters: usize,
    p: &Potential,
    solver: &Solver,
    units: &UnitSystem,
) -> Result<Vec<ResonancePeak>> {
    if curve.len() < 3 {
        return Err(Error::InvalidArgument("resonance search needs at least 3 curve points".into()));
    }
    let t_at = |e: f64| solver.solve(p, e, units).map(|s| s.transmission).unwrap_or(f64::NAN);
    let (es, ts) = (&curve.energies, &curve.transmission);
    let mut peaks = Vec::new();
    for i in local_maxima(ts) {
        let mut right = i + 1;
        while ts[right] == ts[i] {
            right += 1;
        }
        let (e_ref, t_ref) = golden_section_max(&t_at, es[i - 1], es[right], refine_iters);
        let (energy, transmission) = if t_ref >= ts[i] { (e_ref, t_ref) } else { (es[i], ts[i]) };
        let half = 0.5 * transmission;
        let lo = half_max_crossing(&t_at, es, ts, i, energy, half, Side::Left);
        let hi = half_max_crossing(&t_at, es, ts, right, energy, half, Side::Right);
        let fwhm = match (lo, hi) {
            (Some(lo), Some(hi)) if hi > lo => Some(hi - lo),
            _ => None,
        };
        peaks.push(ResonancePeak {
            energy,
            transmission,
            fwhm,
            n_match: None,
            e_eigen: None,
            deviation: None,
        });
    }
    Ok(peaks)
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Left,
    Right,
}

/// Walks outward from the peak to the first sample below `half`, giving up at
/// the curve edge or at a local minimum that stays above `half`.
fn half_max_crossing(
    t_at: &dyn Fn(f64) -> f64,
    es: &[f64],
    ts: &[f64],
    from: usize,
    e_peak: f64,
    half: f64,
    side: Side,
) -> Option<f64> {
    let mut j = from;
    loop {
        if ts[j] < half {
            break;
        }
        let next = match side {
            Side::Left => j.checked_sub(1)?,
            Side::Right => {
                if j + 1 >= ts.len() {
                    return None;
                }
                j + 1
            }
        };
        if ts[next].is_nan() || ts[next] > ts[j] {
            return None;
        }
        j = next;
    }
    // T(outer) < half ≤ T(peak); bisect between them
    let (mut outer, mut inner) = (es[j], e_peak);
    for _ in 0..HALF_MAX_BISECTIONS {
        let mid = 0.5 * (outer + inner);
        let t = t_at(mid);
        if t.is_nan() {
            return None;
        }
        if t < half {
            outer = mid;
        } else {
            inner = mid;
        }
    }
    Some(0.5 * (outer + inner))
}

/// Fills in n, E_n = (n + ½)ħω and the relative deviation for each peak.
///
/// Peaks are taken in increasing energy, one per level: the lowest peak goes
/// to its nearest level and each later peak to the next level up.
pub fn compare_to_harmonic(peaks: &[ResonancePeak], hbar_omega: f64) -> Result<Vec<ResonancePeak>> {
    if !(hbar_omega > 0.0 && hbar_omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("hbar_omega must be positive, got {hbar_omega}")));
    }
    let mut out: Vec<ResonancePeak> = peaks.to_vec();
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let mut next: Option<usize> = None;
    for peak in &mut out {
        let n = match next {
            Some(n) => n,
            None => (peak.energy / hbar_omega - 0.5).round().max(0.0) as usize,
        };
        let level = super::harmonic::harmonic_level(n, hbar_omega);
        peak.n_match = Some(n);
        peak.e_eigen = Some(level);
        peak.deviation = Some((peak.energy - level) / level);
        next = Some(n + 1);
    }
    Ok(out)
}

/// Samples whose T exceeds [`MEDIAN_FACTOR`] times the median of their
/// neighbourhood.
pub fn fine_scan_candidates(t: &[f64]) -> Vec<usize> {
    let n = t.len();
    (0..n)
        .filter(|&i| {
            let lo = i.saturating_sub(MEDIAN_HALF_WINDOW);
            let hi = (i + MEDIAN_HALF_WINDOW + 1).min(n);
            let mut window: Vec<f64> = t[lo..hi].iter().copied().filter(|v| !v.is_nan()).collect();
            if window.is_empty() || t[i].is_nan() {
                return false;
            }
            window.sort_by(f64::total_cmp);
            let median = window[window.len() / 2];
            t[i] > MEDIAN_FACTOR * median
        })
        .collect()
}

/// Coarse sweep plus peak search, the pipeline behind the `resonances`
/// command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceScan {
    pub curve: TransmissionCurve,
    pub peaks: Vec<ResonancePeak>,
}

/// Sweeps `n_points` energies, re-samples the two grid intervals around every
/// fine-scan candidate at [`FINE_SCAN_FACTOR`] times the density, and refines
/// the peaks of the merged curve.
pub fn scan_resonances(
    p: &Potential,
    e_min: f64,
    e_max: f64,
    n_points: usize,
    solver: &Solver,
    units: &UnitSystem,
    refine_iters: usize,
) -> Result<ResonanceScan> {
    let mut curve = sweep(p, e_min, e_max, n_points, solver, units)?;
    let candidates = fine_scan_candidates(&curve.transmission);
    if !candidates.is_empty() {
        // fine points live on one integer lattice, so overlapping windows
        // produce identical energies rather than near-duplicates
        let f = FINE_SCAN_FACTOR;
        let top = (n_points - 1) * f;
        let lattice: BTreeSet<usize> = candidates
            .into_iter()
            .flat_map(|i| (i.saturating_sub(1) * f + 1)..((i + 1) * f).min(top))
            .filter(|j| j % f != 0)
            .collect();
        let span = e_max - e_min;
        let extra: Vec<f64> = lattice.into_iter().map(|j| e_min + span * (j as f64 / top as f64)).collect();
        curve.merge(sweep_energies(p, &extra, solver, units, true));
    }
    let peaks = find_resonances(&curve, refine_iters, p, solver, units)?;
    Ok(ResonanceScan { curve, peaks })
}
