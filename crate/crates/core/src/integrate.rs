//! Integration of `ψ'' = g(x) ψ`, `g = (V − E)/(ħ²/2m)`, with complex ψ.
//!
//! Two fixed-step schemes are available:
//!
//! * classic fourth-order Runge-Kutta on the state `(ψ, ψ')`;
//! * a Numerov three-term recurrence on ψ alone. The recurrence coefficient
//!   at the centre point is fitted so that the scheme reproduces
//!   `exp(±√g x)` exactly when g is constant, which keeps the usual h⁴
//!   global error for smooth potentials and makes flat regions exact.
//!   The second starting value and ψ' (needed at the far end of the sweep)
//!   come from a fitted Taylor expansion through h⁴, using one-sided
//!   differences of g.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::units::{wavevector, UnitSystem};

/// |ψ| beyond which an integration is abandoned.
pub const OVERFLOW_LIMIT: f64 = 1e150;

/// RK4 runs with fewer steps than this are marked low resolution.
pub const LOW_RESOLUTION_STEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
    Numerov,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rk4" => Ok(Method::Rk4),
            "numerov" => Ok(Method::Numerov),
            _ => Err(Error::InvalidArgument(format!("unknown method `{s}` (expected rk4 or numerov)"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::Numerov => "numerov",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrationSettings {
    pub method: Method,
    /// Number of uniform intervals across the barrier.
    pub steps: usize,
    pub record_trajectory: bool,
}

impl IntegrationSettings {
    pub fn new(method: Method, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("steps must be at least 1".into()));
        }
        Ok(IntegrationSettings {
            method,
            steps,
            record_trajectory: false,
        })
    }

    pub fn rk4(steps: usize) -> Result<Self> {
        Self::new(Method::Rk4, steps)
    }

    pub fn numerov(steps: usize) -> Result<Self> {
        Self::new(Method::Numerov, steps)
    }

    pub fn recording(mut self) -> Self {
        self.record_trajectory = true;
        self
    }

    pub fn is_low_resolution(&self) -> bool {
        self.method == Method::Rk4 && self.steps < LOW_RESOLUTION_STEPS
    }
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        IntegrationSettings {
            method: Method::Rk4,
            steps: 2000,
            record_trajectory: false,
        }
    }
}

/// ψ and ψ' sampled on an ascending grid.
///
/// Without `record_trajectory` only the two end points x = start and x = end
/// are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub xs: Vec<f64>,
    pub psi: Vec<Complex64>,
    pub dpsi: Vec<Complex64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// (ψ, ψ') at the smallest x.
    pub fn start(&self) -> (Complex64, Complex64) {
        (self.psi[0], self.dpsi[0])
    }

    /// (ψ, ψ') at the largest x.
    pub fn end(&self) -> (Complex64, Complex64) {
        let n = self.len() - 1;
        (self.psi[n], self.dpsi[n])
    }

    /// Im(ψ* ψ') at sample i; proportional to the probability current.
    pub fn wronskian(&self, i: usize) -> f64 {
        (self.psi[i].conj() * self.dpsi[i]).im
    }
}

/// The transmitted plane wave `e^{ikx}` and its slope at x.
pub fn transmitted_wave(k_out: f64, x: f64) -> (Complex64, Complex64) {
    let psi = Complex64::from_polar(1.0, k_out * x);
    (psi, Complex64::i() * k_out * psi)
}

/// ψ(L) = e^{ik L}, ψ'(L) = ik e^{ik L} for the transmitted amplitude F = 1.
pub fn initial_conditions(p: &Potential, energy: f64, units: &UnitSystem) -> Result<(Complex64, Complex64)> {
    if !(energy > p.v_right()) {
        return Err(Error::NoTransmission {
            energy,
            v_right: p.v_right(),
        });
    }
    let k_out = wavevector(energy, p.v_right(), units).value;
    Ok(transmitted_wave(k_out, p.length()))
}

/// Integrates from x = L down to x = 0 starting from the transmitted wave.
pub fn integrate_backward(
    p: &Potential,
    energy: f64,
    settings: &IntegrationSettings,
    units: &UnitSystem,
) -> Result<Trajectory> {
    let (psi_l, dpsi_l) = initial_conditions(p, energy, units)?;
    integrate_from(p, energy, settings, units, psi_l, dpsi_l)
}

/// Backward integration from x = L with caller-supplied ψ(L), ψ'(L).
pub fn integrate_from(
    p: &Potential,
    energy: f64,
    settings: &IntegrationSettings,
    units: &UnitSystem,
    psi_l: Complex64,
    dpsi_l: Complex64,
) -> Result<Trajectory> {
    let g = |x: f64| units.curvature_coefficient(p.value(x), energy);
    let mut run = propagate(&g, p.length(), 0.0, settings, psi_l, dpsi_l)?;
    run.xs.reverse();
    run.psi.reverse();
    run.dpsi.reverse();
    if let Some(x0) = run.xs.first_mut() {
        *x0 = 0.0;
    }
    Ok(run)
}

/// Integrates `ψ'' = g(x) ψ` from `x_from` to `x_to` (either direction).
///
/// Samples are returned in integration order.
pub(crate) fn propagate(
    g: &dyn Fn(f64) -> f64,
    x_from: f64,
    x_to: f64,
    settings: &IntegrationSettings,
    psi0: Complex64,
    dpsi0: Complex64,
) -> Result<Trajectory> {
    if settings.steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    match settings.method {
        Method::Rk4 => rk4(g, x_from, x_to, settings.steps, settings.record_trajectory, psi0, dpsi0),
        Method::Numerov => numerov(g, x_from, x_to, settings.steps, settings.record_trajectory, psi0, dpsi0),
    }
}

#[inline]
fn grid(x_from: f64, x_to: f64, steps: usize, n: usize) -> f64 {
    if n == steps {
        x_to
    } else {
        x_from + (x_to - x_from) * (n as f64 / steps as f64)
    }
}

#[inline]
fn check(psi: Complex64, x: f64) -> Result<()> {
    let m = psi.norm();
    if m.is_finite() && m <= OVERFLOW_LIMIT {
        Ok(())
    } else {
        Err(Error::Divergence { x })
    }
}

struct Samples {
    xs: Vec<f64>,
    psi: Vec<Complex64>,
    dpsi: Vec<Complex64>,
}

impl Samples {
    fn new(record: bool, steps: usize) -> Self {
        let cap = if record { steps + 1 } else { 2 };
        Samples {
            xs: Vec::with_capacity(cap),
            psi: Vec::with_capacity(cap),
            dpsi: Vec::with_capacity(cap),
        }
    }

    fn push(&mut self, x: f64, psi: Complex64, dpsi: Complex64) {
        self.xs.push(x);
        self.psi.push(psi);
        self.dpsi.push(dpsi);
    }

    fn into_trajectory(self) -> Trajectory {
        Trajectory {
            xs: self.xs,
            psi: self.psi,
            dpsi: self.dpsi,
        }
    }
}

fn rk4(
    g: &dyn Fn(f64) -> f64,
    x_from: f64,
    x_to: f64,
    steps: usize,
    record: bool,
    psi0: Complex64,
    dpsi0: Complex64,
) -> Result<Trajectory> {
    let mut out = Samples::new(record, steps);
    let (mut psi, mut dpsi) = (psi0, dpsi0);
    out.push(x_from, psi, dpsi);
    let mut x = x_from;
    let mut g_here = g(x);
    for n in 1..=steps {
        let x_next = grid(x_from, x_to, steps, n);
        let h = x_next - x;
        let g_mid = g(x + 0.5 * h);
        let g_next = g(x_next);

        let k1_psi = dpsi;
        let k1_dpsi = psi * g_here;
        let k2_psi = dpsi + k1_dpsi * (0.5 * h);
        let k2_dpsi = (psi + k1_psi * (0.5 * h)) * g_mid;
        let k3_psi = dpsi + k2_dpsi * (0.5 * h);
        let k3_dpsi = (psi + k2_psi * (0.5 * h)) * g_mid;
        let k4_psi = dpsi + k3_dpsi * h;
        let k4_dpsi = (psi + k3_psi * h) * g_next;

        psi += (k1_psi + (k2_psi + k3_psi) * 2.0 + k4_psi) * (h / 6.0);
        dpsi += (k1_dpsi + (k2_dpsi + k3_dpsi) * 2.0 + k4_dpsi) * (h / 6.0);
        check(psi, x_next)?;
        if !dpsi.norm().is_finite() {
            return Err(Error::Divergence { x: x_next });
        }
        if record || n == steps {
            out.push(x_next, psi, dpsi);
        }
        x = x_next;
        g_here = g_next;
    }
    Ok(out.into_trajectory())
}

/// Exact one-step propagator for constant g over a signed step s:
/// `ψ(x+s) = C ψ(x) + S ψ'(x)`, returned as (C − 1, S) so that the small
/// part of C survives rounding.
#[inline]
fn flat_propagator(g: f64, s: f64) -> (f64, f64) {
    if g > 0.0 {
        let q = g.sqrt();
        let half = (0.5 * q * s).sinh();
        (2.0 * half * half, (q * s).sinh() / q)
    } else if g < 0.0 {
        let k = (-g).sqrt();
        let half = (0.5 * k * s).sin();
        (-2.0 * half * half, (k * s).sin() / k)
    } else {
        (0.0, s)
    }
}

/// g, g', g'' at x from samples at x, x + s/2, x + s.
fn local_taylor(g: &dyn Fn(f64) -> f64, x: f64, s: f64) -> (f64, f64, f64) {
    let d = 0.5 * s;
    let (g0, g1, g2) = (g(x), g(x + d), g(x + s));
    let slope = (-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * d);
    let bend = (g0 - 2.0 * g1 + g2) / (d * d);
    (g0, slope, bend)
}

/// Coefficients (P − 1, Q) with ψ(x+s) ≈ P ψ(x) + Q ψ'(x), accurate through
/// s⁴ and exact for constant g.
fn taylor_step(g: &dyn Fn(f64) -> f64, x: f64, s: f64) -> (f64, f64) {
    let (g0, slope, bend) = local_taylor(g, x, s);
    let (cm1, sn) = flat_propagator(g0, s);
    let s3 = s * s * s;
    let s4 = s3 * s;
    (cm1 + s3 * slope / 6.0 + s4 * bend / 24.0, sn + s4 * slope / 12.0)
}

/// ψ'(x) from ψ(x) and the difference ψ(x + s) − ψ(x).
fn reconstruct_slope(g: &dyn Fn(f64) -> f64, x: f64, s: f64, psi: Complex64, diff: Complex64) -> Complex64 {
    let (pm1, qc) = taylor_step(g, x, s);
    (diff - psi * pm1) / qc
}

/// Numerov in summed form: with φ = (1 − h²g/12) ψ the recurrence
/// φₙ₊₁ = 2Cₙ φₙ − φₙ₋₁ is carried as differences Δₙ = φₙ₊₁ − φₙ, which keeps
/// rounding from being amplified by 1/h² as it is in the three-term form.
fn numerov(
    g: &dyn Fn(f64) -> f64,
    x_from: f64,
    x_to: f64,
    steps: usize,
    record: bool,
    psi0: Complex64,
    dpsi0: Complex64,
) -> Result<Trajectory> {
    let h = (x_to - x_from) / steps as f64;
    let a = h * h / 12.0;
    let mut out = Samples::new(record, steps);
    out.push(x_from, psi0, dpsi0);

    let x1 = grid(x_from, x_to, steps, 1);
    let (pm1, qc) = taylor_step(g, x_from, x1 - x_from);
    let step0 = psi0 * pm1 + dpsi0 * qc;
    let mut cur = psi0 + step0;
    check(cur, x1)?;

    let mut g_prev = g(x_from);
    let mut g_cur = g(x1);
    let mut d_prev = 1.0 - a * g_prev;
    let mut d_cur = 1.0 - a * g_cur;
    let mut phi = d_cur * cur;
    // φ₁ − φ₀
    let mut delta = d_cur * step0 - a * (g_cur - g_prev) * psi0;
    let mut x_prev = x_from;
    let mut x_cur = x1;

    // ψₙ₋₁ − ψₙ from the carried difference
    let back_diff = |delta: Complex64, phi: Complex64, d_prev: f64, d_cur: f64, g_prev: f64, g_cur: f64| {
        -delta / d_prev + phi * (a * (g_prev - g_cur) / (d_prev * d_cur))
    };

    if record && steps > 1 {
        let diff = back_diff(delta, phi, d_prev, d_cur, g_prev, g_cur);
        out.push(x_cur, cur, reconstruct_slope(g, x_cur, x_prev - x_cur, cur, diff));
    }

    for n in 2..=steps {
        let x_next = grid(x_from, x_to, steps, n);
        let g_next = g(x_next);
        let d_next = 1.0 - a * g_next;
        if d_next.abs() < 1e-12 {
            return Err(Error::Divergence { x: x_next });
        }
        let (cm1, _) = flat_propagator(g_cur, h);
        delta += phi * (2.0 * cm1);
        phi += delta;
        let next = phi / d_next;
        check(next, x_next)?;
        cur = next;
        x_prev = x_cur;
        x_cur = x_next;
        g_prev = g_cur;
        g_cur = g_next;
        d_prev = d_cur;
        d_cur = d_next;
        if record && n < steps {
            let diff = back_diff(delta, phi, d_prev, d_cur, g_prev, g_cur);
            out.push(x_cur, cur, reconstruct_slope(g, x_cur, x_prev - x_cur, cur, diff));
        }
    }

    let diff = back_diff(delta, phi, d_prev, d_cur, g_prev, g_cur);
    let slope = reconstruct_slope(g, x_cur, x_prev - x_cur, cur, diff);
    if !slope.norm().is_finite() {
        return Err(Error::Divergence { x: x_cur });
    }
    out.push(x_cur, cur, slope);
    Ok(out.into_trajectory())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units() -> UnitSystem {
        UnitSystem::electron()
    }

    #[test]
    fn plane_wave_at_origin() {
        let k = 5.123_167_222_813_993;
        let (psi, dpsi) = transmitted_wave(k, 0.0);
        assert_eq!(psi, Complex64::new(1.0, 0.0));
        assert!((dpsi - Complex64::new(0.0, k)).norm() < 1e-15);
    }

    #[test]
    fn initial_conditions_values() {
        let p = Potential::square(0.0, 2.0).unwrap();
        let (psi, dpsi) = initial_conditions(&p, 1.0, &units()).unwrap();
        let phase = 10.246_334_445_627_987;
        assert!((psi - Complex64::from_polar(1.0, phase)).norm() < 1e-12);
        assert!((psi.norm() - 1.0).abs() < 1e-15);
        assert!((dpsi / psi - Complex64::new(0.0, 5.123_167_222_813_993)).norm() < 1e-9);

        let raised = p.with_exterior(0.0, 1.0).unwrap();
        assert!(matches!(
            initial_conditions(&raised, 1.0, &units()),
            Err(Error::NoTransmission { .. })
        ));
    }

    #[test]
    fn numerov_is_exact_on_flat_potentials() {
        let p = Potential::square(0.0, 1.0).unwrap();
        let k = wavevector(1.0, 0.0, &units()).value;
        for steps in [1, 2, 3, 7, 50] {
            let t = integrate_backward(&p, 1.0, &IntegrationSettings::numerov(steps).unwrap(), &units()).unwrap();
            let (psi, dpsi) = t.start();
            assert!((psi - Complex64::new(1.0, 0.0)).norm() < 1e-10, "steps={steps} psi={psi}");
            assert!((dpsi - Complex64::new(0.0, k)).norm() < 1e-10, "steps={steps} dpsi={dpsi}");
        }
        // also inside a barrier, where the solution is a mix of growing and decaying exponentials
        let wall = Potential::square(1.0, 1.0).unwrap();
        let coarse = integrate_backward(&wall, 0.5, &IntegrationSettings::numerov(3).unwrap(), &units()).unwrap();
        let fine = integrate_backward(&wall, 0.5, &IntegrationSettings::rk4(20_000).unwrap(), &units()).unwrap();
        assert!((coarse.start().0 - fine.start().0).norm() < 1e-9 * fine.start().0.norm());
        assert!((coarse.start().1 - fine.start().1).norm() < 1e-9 * fine.start().1.norm());
    }

    #[test]
    fn recorded_grid_spans_barrier() {
        let p = Potential::parabola(10.0, 2.0).unwrap();
        for method in [Method::Rk4, Method::Numerov] {
            let s = IntegrationSettings::new(method, 40).unwrap().recording();
            let t = integrate_backward(&p, 3.0, &s, &units()).unwrap();
            assert_eq!(t.len(), 41);
            assert_eq!(t.xs[0], 0.0);
            assert_eq!(t.xs[40], 2.0);
            assert!(t.xs.windows(2).all(|w| w[0] < w[1]));
            let (psi_l, _) = initial_conditions(&p, 3.0, &units()).unwrap();
            assert_eq!(t.end().0, psi_l);
        }
        let unrecorded = integrate_backward(&p, 3.0, &IntegrationSettings::rk4(40).unwrap(), &units()).unwrap();
        assert_eq!(unrecorded.xs, vec![0.0, 2.0]);
    }

    #[test]
    fn overflow_is_reported() {
        let p = Potential::square(500.0, 10.0).unwrap();
        let err = integrate_backward(&p, 1.0, &IntegrationSettings::rk4(5000).unwrap(), &units()).unwrap_err();
        match err {
            Error::Divergence { x } => assert!(x > 0.0 && x < 10.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_steps_rejected() {
        assert!(IntegrationSettings::rk4(0).is_err());
        assert!(IntegrationSettings::rk4(4).unwrap().is_low_resolution());
        assert!(!IntegrationSettings::rk4(5).unwrap().is_low_resolution());
        assert!(!IntegrationSettings::numerov(2).unwrap().is_low_resolution());
    }
}
