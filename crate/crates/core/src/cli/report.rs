use std::fmt::Write as _;

use super::commands::{Diagnostics, Outcome};
use crate::analysis::ResonancePeak;

const W: usize = 14;

/// Six significant digits; scientific notation outside [1e-4, 1e6).
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    // exponent after rounding to six digits, so 0.9999999 counts as 1
    let sci = format!("{x:.5e}");
    let mag: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

fn sig6_opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_else(|| "-".into())
}

fn row(cells: &[String]) -> String {
    let mut s = String::new();
    for c in cells {
        let _ = write!(s, "{c:>W$}");
    }
    s.trim_end().to_string()
}

fn header(names: &[&str]) -> String {
    let cells: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let line = row(&cells);
    format!("{line}\n{}\n", "-".repeat(line.len()))
}

fn kv(s: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(s, "{key:<22}{value}");
}

/// The resonance table; one row per peak.
pub fn resonance_table(peaks: &[ResonancePeak]) -> String {
    if peaks.is_empty() {
        return "no resonances found\n".into();
    }
    let mut s = header(&["n", "E_peak (eV)", "T_peak", "FWHM (eV)", "E_n (eV)", "deviation"]);
    for p in peaks {
        let n = p.n_match.map(|n| n.to_string()).unwrap_or_else(|| "-".into());
        s.push_str(&row(&[
            n,
            sig6(p.energy),
            sig6(p.transmission),
            sig6_opt(p.fwhm),
            sig6_opt(p.e_eigen),
            sig6_opt(p.deviation),
        ]));
        s.push('\n');
    }
    s
}

/// Human-readable summary of a finished command.
pub fn render_report(outcome: &Outcome, diag: &Diagnostics) -> String {
    let mut s = String::new();
    match outcome {
        Outcome::Transmit(t) => {
            kv(&mut s, "energy (eV)", sig6(t.energy_ev));
            kv(&mut s, "solver", format!("{} ({})", t.solver, t.resolution));
            kv(&mut s, "channel", format!("{:?}", t.channel).to_lowercase());
            kv(&mut s, "T", sig6(t.transmission));
            kv(&mut s, "R", sig6(t.reflection));
            kv(&mut s, "T + R - 1", sig6(t.transmission + t.reflection - 1.0));
            kv(&mut s, "A", format!("{} {:+}i", sig6(t.a.re), sig6(t.a.im)));
            kv(&mut s, "B", format!("{} {:+}i", sig6(t.b.re), sig6(t.b.im)));
        }
        Outcome::Sweep(c) => {
            let finite = c.transmission.iter().copied().filter(|t| !t.is_nan());
            let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), t| (a.min(t), b.max(t)));
            kv(&mut s, "solver", format!("{} ({})", c.solver, c.resolution));
            kv(&mut s, "points", c.len());
            if let (Some(a), Some(b)) = (c.energies.first(), c.energies.last()) {
                kv(&mut s, "energy range (eV)", format!("{} .. {}", sig6(*a), sig6(*b)));
            }
            kv(&mut s, "T min", sig6(lo));
            kv(&mut s, "T max", sig6(hi));
        }
        Outcome::Resonances(r) => {
            kv(&mut s, "hbar omega (eV)", sig6_opt(r.hbar_omega));
            kv(&mut s, "curve points", r.curve.len());
            s.push('\n');
            s.push_str(&resonance_table(&r.peaks));
        }
        Outcome::Wavefunction(w) => {
            kv(&mut s, "energy (eV)", sig6(w.energy_ev));
            kv(&mut s, "T", sig6(w.transmission));
            kv(&mut s, "samples", w.x_nm.len());
            kv(&mut s, "density maxima", w.density_peaks_nm.len());
            let xs: Vec<String> = w.density_peaks_nm.iter().map(|&x| sig6(x)).collect();
            kv(&mut s, "maxima at (nm)", xs.join(" "));
        }
        Outcome::Compare(c) => {
            kv(&mut s, "reference", format!("backward, {} steps", c.reference.resolution));
            kv(&mut s, "energies", c.energies.len());
            s.push('\n');
            s.push_str(&header(&["solver", "resolution", "max |dT|"]));
            for curve in &c.curves {
                s.push_str(&row(&[curve.solver.to_string(), curve.resolution.to_string(), sig6(curve.max_abs_diff)]));
                s.push('\n');
            }
        }
        Outcome::Eigen(e) => {
            let st = &e.state;
            kv(&mut s, "level n", st.n);
            kv(&mut s, "energy (eV)", sig6(st.energy));
            kv(&mut s, "(n + 1/2) hbar omega", sig6(e.harmonic_energy));
            kv(&mut s, "relative difference", sig6((st.energy - e.harmonic_energy) / e.harmonic_energy));
            kv(&mut s, "density maxima", e.density_peaks_nm.len());
            let xs: Vec<String> = e.density_peaks_nm.iter().map(|&x| sig6(x)).collect();
            kv(&mut s, "maxima at (nm)", xs.join(" "));
        }
    }
    if !diag.failures.is_empty() {
        let _ = writeln!(s, "\n{} point(s) failed:", diag.failures.len());
        for f in &diag.failures {
            let _ = writeln!(s, "  E = {} eV: {}", sig6(f.energy), f.message);
        }
    }
    for w in &diag.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}
