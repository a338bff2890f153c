use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use super::commands::{Diagnostics, Outcome};
use super::config::{Format, RunConfig};
use super::CliError;
use crate::solvers::SolverTag;

pub const SCHEMA_VERSION: u32 = 1;

/// Full precision for data files: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Serialize)]
struct Document<'a> {
    v: u32,
    config: &'a RunConfig,
    results: &'a Outcome,
    diagnostics: &'a Diagnostics,
}

pub fn to_json(cfg: &RunConfig, outcome: &Outcome, diag: &Diagnostics) -> String {
    let doc = Document {
        v: SCHEMA_VERSION,
        config: cfg,
        results: outcome,
        diagnostics: diag,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("results serialize");
    s.push('\n');
    s
}

fn column_name(solver: SolverTag, resolution: usize) -> String {
    match solver {
        SolverTag::Backward => format!("T_backward_{resolution}"),
        SolverTag::TransferMatrix => format!("T_tmm_{resolution}"),
        SolverTag::Wkb => format!("T_wkb_{resolution}"),
    }
}

pub fn to_csv(outcome: &Outcome) -> String {
    let mut s = String::new();
    match outcome {
        Outcome::Transmit(t) => {
            s.push_str("energy_eV,T,R,re_A,im_A,re_B,im_B\n");
            let row = [t.energy_ev, t.transmission, t.reflection, t.a.re, t.a.im, t.b.re, t.b.im];
            s.push_str(&row.map(num).join(","));
            s.push('\n');
        }
        Outcome::Sweep(c) => {
            s.push_str("energy_eV,T\n");
            for (e, t) in c.energies.iter().zip(&c.transmission) {
                let _ = writeln!(s, "{},{}", num(*e), num(*t));
            }
        }
        Outcome::Resonances(r) => {
            s.push_str("E_peak_eV,T_peak,fwhm_eV,n,E_eigen_eV,deviation\n");
            for p in &r.peaks {
                let n = p.n_match.map(|n| n.to_string()).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    num(p.energy),
                    num(p.transmission),
                    opt(p.fwhm),
                    n,
                    opt(p.e_eigen),
                    opt(p.deviation)
                );
            }
        }
        Outcome::Wavefunction(w) => {
            s.push_str("x_nm,re_psi,im_psi,density\n");
            for i in 0..w.x_nm.len() {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    num(w.x_nm[i]),
                    num(w.re_psi[i]),
                    num(w.im_psi[i]),
                    num(w.density[i])
                );
            }
        }
        Outcome::Compare(c) => {
            s.push_str("energy_eV,");
            s.push_str(&format!("T_reference_backward_{}", c.reference.resolution));
            for curve in &c.curves {
                s.push(',');
                s.push_str(&column_name(curve.solver, curve.resolution));
            }
            s.push('\n');
            for (i, e) in c.energies.iter().enumerate() {
                s.push_str(&num(*e));
                s.push(',');
                s.push_str(&num(c.reference.transmission[i]));
                for curve in &c.curves {
                    s.push(',');
                    s.push_str(&num(curve.transmission[i]));
                }
                s.push('\n');
            }
        }
        Outcome::Eigen(e) => {
            s.push_str("x_nm,psi,density\n");
            let st = &e.state;
            for i in 0..st.xs.len() {
                let _ = writeln!(s, "{},{},{}", num(st.xs[i]), num(st.psi[i]), num(st.density[i]));
            }
        }
    }
    s
}

pub fn render(cfg: &RunConfig, outcome: &Outcome, diag: &Diagnostics) -> String {
    match cfg.format {
        Format::Json => to_json(cfg, outcome, diag),
        Format::Csv => to_csv(outcome),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
