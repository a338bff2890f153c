use crate::error::{Error, Result};
use crate::integrate::Trajectory;

/// |ψ|² / max |ψ|² at every sample.
pub fn density_profile(t: &Trajectory) -> Result<Vec<f64>> {
    if t.is_empty() {
        return Err(Error::Degenerate("empty trajectory".into()));
    }
    let raw: Vec<f64> = t.psi.iter().map(|z| z.norm_sqr()).collect();
    normalize_max(&raw)
}

/// Scales nonnegative samples so that the largest is exactly 1.
pub fn normalize_max(values: &[f64]) -> Result<Vec<f64>> {
    let max = values.iter().fold(0.0f64, |m, &v| m.max(v));
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::Degenerate("density is zero everywhere".into()));
    }
    Ok(values.iter().map(|&v| if v == max { 1.0 } else { v / max }).collect())
}

/// Positions of the interior local maxima of a sampled profile, refined by a
/// parabola through each maximum and its neighbours.
pub fn density_peaks(xs: &[f64], density: &[f64]) -> Vec<f64> {
    super::resonance::local_maxima(density)
        .into_iter()
        .map(|i| {
            let (y0, y1, y2) = (density[i - 1], density[i], density[i + 1]);
            let curv = y0 - 2.0 * y1 + y2;
            let h = 0.5 * (xs[i + 1] - xs[i - 1]);
            if curv < 0.0 {
                xs[i] + 0.5 * h * (y0 - y2) / curv
            } else {
                xs[i]
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn plane_wave_density_is_flat() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.02).collect();
        let psi: Vec<Complex64> = xs.iter().map(|&x| Complex64::from_polar(2.0, 3.0 * x)).collect();
        let t = Trajectory { xs: xs.clone(), dpsi: psi.clone(), psi };
        let d = density_profile(&t).unwrap();
        assert!(d.iter().all(|&v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn zero_is_degenerate() {
        let t = Trajectory {
            xs: vec![0.0, 1.0],
            psi: vec![Complex64::new(0.0, 0.0); 2],
            dpsi: vec![Complex64::new(0.0, 0.0); 2],
        };
        assert!(matches!(density_profile(&t), Err(Error::Degenerate(_))));
    }

    #[test]
    fn peak_positions() {
        let xs: Vec<f64> = (0..=400).map(|i| i as f64 * 0.01).collect();
        let d: Vec<f64> = xs.iter().map(|&x| (std::f64::consts::PI * x).sin().powi(2)).collect();
        let peaks = density_peaks(&xs, &d);
        assert_eq!(peaks.len(), 4);
        for (k, p) in peaks.iter().enumerate() {
            assert!((p - (k as f64 + 0.5)).abs() < 1e-6);
        }
    }
}
