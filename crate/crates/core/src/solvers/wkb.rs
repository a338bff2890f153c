use num_complex::Complex64;

use super::{exterior_waves, Channel, ScatteringSolution, SolverTag};
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::units::UnitSystem;

/// Sub-intervals per segment scanned for sign changes of V(x) − E.
const SCAN_INTERVALS: usize = 512;
const BISECTION_ITERATIONS: usize = 200;

/// A maximal interval where V(x) > E, with flags telling whether each end is
/// a classical turning point (V = E) rather than a jump or the barrier edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForbiddenInterval {
    pub start: f64,
    pub end: f64,
    pub turning_start: bool,
    pub turning_end: bool,
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo) > 0.0;
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == f_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The classically forbidden set {x in [0, L] : V(x) > E}.
///
/// Turning points are located per segment by bisection on V(x) − E; segments
/// are evaluated with their own formula right up to their end point so that
/// jumps between segments are not mistaken for roots.
pub fn forbidden_intervals(p: &Potential, energy: f64) -> Vec<ForbiddenInterval> {
    let mut out: Vec<ForbiddenInterval> = Vec::new();
    for seg in p.segments() {
        let f = |x: f64| seg.value(x) - energy;
        let mut open: Option<(f64, bool)> = None;
        let mut x_prev = seg.start;
        let mut above_prev = f(x_prev) > 0.0;
        if above_prev {
            open = Some((seg.start, false));
        }
        for i in 1..=SCAN_INTERVALS {
            let x = if i == SCAN_INTERVALS {
                seg.end
            } else {
                seg.start + seg.width() * i as f64 / SCAN_INTERVALS as f64
            };
            let above = f(x) > 0.0;
            if above != above_prev {
                let root = bisect(&f, x_prev, x);
                if above {
                    open = Some((root, true));
                } else if let Some((start, turning_start)) = open.take() {
                    out.push(ForbiddenInterval {
                        start,
                        end: root,
                        turning_start,
                        turning_end: true,
                    });
                }
            }
            x_prev = x;
            above_prev = above;
        }
        if let Some((start, turning_start)) = open {
            out.push(ForbiddenInterval {
                start,
                end: seg.end,
                turning_start,
                turning_end: false,
            });
        }
    }
    // merge pieces that continue across a segment boundary
    let mut merged: Vec<ForbiddenInterval> = Vec::with_capacity(out.len());
    for iv in out {
        match merged.last_mut() {
            Some(last) if !last.turning_end && !iv.turning_start && last.end == iv.start => {
                last.end = iv.end;
                last.turning_end = iv.turning_end;
            }
            _ => merged.push(iv),
        }
    }
    merged
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2) + panels % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

/// ∫ κ dx over one forbidden interval. Near a turning point κ ~ sqrt(x − x_t);
/// the substitution x = x_t ± w u² makes the integrand smooth for Simpson.
fn kappa_integral(kappa: &dyn Fn(f64) -> f64, iv: &ForbiddenInterval, panels: usize) -> f64 {
    let from_start = |a: f64, w: f64| simpson(&|u: f64| kappa(a + w * u * u) * 2.0 * w * u, 0.0, 1.0, panels);
    let from_end = |b: f64, w: f64| simpson(&|u: f64| kappa(b - w * u * u) * 2.0 * w * u, 0.0, 1.0, panels);
    let (a, b) = (iv.start, iv.end);
    match (iv.turning_start, iv.turning_end) {
        (false, false) => simpson(kappa, a, b, panels),
        (true, false) => from_start(a, b - a),
        (false, true) => from_end(b, b - a),
        (true, true) => {
            let half = 0.5 * (b - a);
            from_start(a, half) + from_end(b, half)
        }
    }
}

/// Semiclassical estimate `T = exp(−2 ∫ κ dx)` over the forbidden set, with
/// `κ = sqrt((V − E)/(ħ²/2m))`. No prefactor or connection corrections.
/// R is set to 1 − T and the amplitudes carry magnitudes only.
pub fn solve_wkb(p: &Potential, energy: f64, quad_points: usize, units: &UnitSystem) -> Result<ScatteringSolution> {
    if quad_points == 0 {
        return Err(Error::InvalidArgument("quad_points must be at least 1".into()));
    }
    let (k_in, k_out, open) = exterior_waves(p, energy, units)?;
    if !open {
        return Ok(ScatteringSolution::closed(energy, k_in, k_out, SolverTag::Wkb, quad_points));
    }
    let c = units.hbar2_over_2m();
    let integral: f64 = forbidden_intervals(p, energy)
        .iter()
        .map(|iv| {
            let v = |x: f64| {
                if x >= iv.end {
                    p.value_left(iv.end)
                } else {
                    p.value(x.max(iv.start))
                }
            };
            let kappa = |x: f64| ((v(x) - energy).max(0.0) / c).sqrt();
            kappa_integral(&kappa, iv, quad_points)
        })
        .sum();
    let transmission = (-2.0 * integral).exp().min(1.0);
    let reflection = 1.0 - transmission;
    let a_mag = (k_out.value / (k_in.value * transmission)).sqrt();
    Ok(ScatteringSolution {
        energy,
        transmission,
        reflection,
        a: Complex64::new(a_mag, 0.0),
        b: Complex64::new(a_mag * reflection.sqrt(), 0.0),
        f: Complex64::new(1.0, 0.0),
        k_in,
        k_out,
        trajectory: None,
        solver: SolverTag::Wkb,
        resolution: quad_points,
        channel: Channel::Open,
        low_resolution: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_turning_points() {
        let p = crate::potential::builtin_parabolic();
        let ivs = forbidden_intervals(&p, 5.0);
        assert_eq!(ivs.len(), 2);
        let r = 0.5f64.sqrt();
        assert_eq!(ivs[0].start, 0.0);
        assert!(!ivs[0].turning_start && ivs[0].turning_end);
        assert!((ivs[0].end - (1.0 - r)).abs() < 1e-13);
        assert!((ivs[1].start - (1.0 + r)).abs() < 1e-13);
        assert!(ivs[1].turning_start && !ivs[1].turning_end);
        assert_eq!(ivs[1].end, 2.0);
    }

    #[test]
    fn square_barrier_whole_width() {
        let p = Potential::square(1.0, 1.0).unwrap();
        assert_eq!(
            forbidden_intervals(&p, 0.5),
            vec![ForbiddenInterval { start: 0.0, end: 1.0, turning_start: false, turning_end: false }]
        );
        assert!(forbidden_intervals(&p, 1.5).is_empty());
    }

    #[test]
    fn adjacent_segments_merge() {
        let p = Potential::new(
            vec![
                crate::potential::Segment::constant(0.0, 0.5, 2.0),
                crate::potential::Segment::constant(0.5, 1.0, 3.0),
            ],
            0.0,
            0.0,
        )
        .unwrap();
        let ivs = forbidden_intervals(&p, 1.0);
        assert_eq!(ivs.len(), 1);
        assert_eq!((ivs[0].start, ivs[0].end), (0.0, 1.0));
    }

    #[test]
    fn above_barrier_is_unity() {
        let p = crate::potential::builtin_parabolic();
        let s = solve_wkb(&p, 10.5, 100, &UnitSystem::electron()).unwrap();
        assert_eq!(s.transmission, 1.0);
        assert_eq!(s.reflection, 0.0);
    }
}
