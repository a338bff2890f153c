use barrierscope::analysis::*;
use barrierscope::*;

fn units() -> UnitSystem {
    UnitSystem::electron()
}

fn rk4() -> Solver {
    Solver::Backward(IntegrationSettings::rk4(2000).unwrap())
}

#[test]
fn empty_barrier_sweep() {
    let p = parse_potential("on [0, 1]: 0").unwrap();
    let c = sweep(&p, 1.0, 2.0, 10, &rk4(), &units()).unwrap();
    assert_eq!(c.len(), 10);
    assert!(c.transmission.iter().all(|t| (t - 1.0).abs() < 1e-10));
    assert!(c.failures.is_empty());
}

#[test]
fn sweep_matches_pointwise_solve() {
    let p = Potential::square(1.0, 1.0).unwrap();
    let c = sweep(&p, 0.25, 0.75, 5, &rk4(), &units()).unwrap();
    assert_eq!(c.energies[2], 0.5);
    let single = solve_backward(&p, 0.5, &IntegrationSettings::rk4(2000).unwrap(), &units()).unwrap();
    assert_eq!(c.transmission[2].to_bits(), single.transmission.to_bits());
}

#[test]
fn sweep_rejects_closed_start() {
    let p = Potential::square(1.0, 1.0).unwrap().with_exterior(0.5, 0.0).unwrap();
    assert!(sweep(&p, 0.4, 2.0, 10, &rk4(), &units()).is_err());
    assert!(sweep(&p, 2.0, 1.0, 10, &rk4(), &units()).is_err());
    assert!(sweep(&p, 1.0, 2.0, 1, &rk4(), &units()).is_err());
}

#[test]
fn parabola_curve_has_resonance_structure() {
    let c = sweep(&builtin_parabolic(), 0.05, 10.0, 2000, &rk4(), &units()).unwrap();
    let below: Vec<usize> = local_maxima(&c.transmission).into_iter().filter(|&i| c.energies[i] < 10.0).collect();
    assert!(below.len() >= 8, "{} maxima", below.len());
}

#[test]
fn lowest_parabola_peak() {
    let scan = scan_resonances(&builtin_parabolic(), 0.05, 10.0, 2000, &rk4(), &units(), DEFAULT_REFINE_ITERS).unwrap();
    let first = &scan.peaks[0];
    assert!((first.energy - 0.616).abs() / 0.616 < 0.02, "{}", first.energy);
    assert!(first.transmission > 0.99);
    let fwhm = first.fwhm.expect("isolated peak has a width");
    assert!(fwhm > 0.0 && fwhm < 1e-3);
}

#[test]
fn peak_list_independent_of_grid_density() {
    let u = units();
    let hw = harmonic_omega_from_parabola(10.0, &u).unwrap();
    for n in [150, 400, 777] {
        let scan = scan_resonances(&builtin_parabolic(), 0.05, 10.0, n, &rk4(), &u, DEFAULT_REFINE_ITERS).unwrap();
        let peaks = compare_to_harmonic(&scan.peaks, hw).unwrap();
        assert_eq!(peaks.len(), 8, "{n} points: {peaks:?}");
        for (k, p) in peaks.iter().enumerate() {
            assert!(p.transmission > 0.999, "{n} points, n={k}: {p:?}");
            assert!(p.deviation.unwrap().abs() < 0.05);
        }
    }
}

#[test]
fn monotone_curve_has_no_peaks() {
    let p = Potential::square(1.0, 0.3).unwrap();
    let c = sweep(&p, 0.05, 0.9, 200, &rk4(), &units()).unwrap();
    assert!(c.transmission.windows(2).all(|w| w[1] > w[0]));
    assert!(find_resonances(&c, DEFAULT_REFINE_ITERS, &p, &rk4(), &units()).unwrap().is_empty());
}

#[test]
fn two_gaussian_synthetic_curve() {
    let (m1, m2) = (2.345, 6.789);
    let f = |e: f64| (-((e - m1) / 0.4).powi(2)).exp() + 0.6 * (-((e - m2) / 0.7).powi(2)).exp();
    let es = energy_grid(0.0, 10.0, 401).unwrap();
    let ts: Vec<f64> = es.iter().map(|&e| f(e)).collect();
    let spacing = es[1] - es[0];
    let found = local_maxima(&ts);
    assert_eq!(found.len(), 2);
    assert!((es[found[0]] - m1).abs() <= spacing);
    assert!((es[found[1]] - m2).abs() <= spacing);
    for (i, m) in found.into_iter().zip([m1, m2]) {
        let (e, _) = golden_section_max(&f, es[i - 1], es[i + 1], DEFAULT_REFINE_ITERS);
        assert!((e - m).abs() < PEAK_ENERGY_TOLERANCE);
    }
}

#[test]
fn plateau_and_nan_maxima() {
    assert_eq!(local_maxima(&[0.0, 1.0, 1.0, 1.0, 0.0]), vec![1]);
    assert_eq!(local_maxima(&[0.0, 1.0, f64::NAN, 2.0, 0.0]), Vec::<usize>::new());
    assert!(local_maxima(&[3.0, 2.0, 1.0]).is_empty());
}

fn peak(energy: f64) -> ResonancePeak {
    ResonancePeak {
        energy,
        transmission: 1.0,
        fwhm: None,
        n_match: None,
        e_eigen: None,
        deviation: None,
    }
}

#[test]
fn harmonic_matching() {
    let m = compare_to_harmonic(&[peak(0.616)], 1.232).unwrap();
    assert_eq!(m[0].n_match, Some(0));
    assert!(m[0].deviation.unwrap().abs() < 1e-12);
    let m = compare_to_harmonic(&[peak(3.0 * 1.232 / 2.0)], 1.232).unwrap();
    assert_eq!(m[0].n_match, Some(1));
    assert_eq!(m[0].deviation, Some(0.0));
    // later peaks take consecutive levels even as they drift upwards
    let m = compare_to_harmonic(&[peak(0.62), peak(1.86), peak(3.3), peak(5.0)], 1.232).unwrap();
    let ns: Vec<usize> = m.iter().map(|p| p.n_match.unwrap()).collect();
    assert_eq!(ns, [0, 1, 2, 3]);
    assert!(compare_to_harmonic(&[peak(1.0)], 0.0).is_err());
}

#[test]
fn harmonic_frequency() {
    let u = units();
    let hw = harmonic_omega_from_parabola(10.0, &u).unwrap();
    assert!((hw - 1.234_501_050_868_076_2).abs() < 1e-12);
    assert!((hw - 1.232).abs() / 1.232 < 0.005);
    let hw4 = harmonic_omega_from_parabola(40.0, &u).unwrap();
    assert!((hw4 / hw - 2.0).abs() < 1e-14);
    let back = hw * hw / (4.0 * u.hbar2_over_2m());
    assert!((back - 10.0).abs() < 1e-12);
    assert!(harmonic_omega_from_parabola(-1.0, &u).is_err());
    assert!((harmonic_level(3, 2.0) - 7.0).abs() < 1e-15);
}

#[test]
fn shooting_ground_state() {
    let u = units();
    let well = ParabolicWell::from_potential(&builtin_parabolic()).unwrap();
    assert_eq!((well.v_min, well.curvature, well.center), (0.0, 10.0, 1.0));
    let hw = harmonic_omega_from_parabola(10.0, &u).unwrap();
    let s = shoot_level(&well, 0, &u).unwrap();
    assert!((s.energy - hw / 2.0).abs() < 1e-3, "{}", s.energy);
    assert_eq!(count_nodes(&s.psi), 0);
    assert_eq!(s.density.iter().cloned().fold(0.0, f64::max), 1.0);
}

#[test]
fn shooting_level_ratio() {
    let u = units();
    let well = ParabolicWell::new(0.0, 10.0, 1.0).unwrap();
    let e0 = shoot_level(&well, 0, &u).unwrap();
    let e5 = shoot_level(&well, 5, &u).unwrap();
    assert!((e5.energy / e0.energy - 11.0).abs() < 1e-3);
    assert_eq!(count_nodes(&e5.psi), 5);
    let peaks = density_peaks(&e5.xs, &e5.density);
    assert_eq!(peaks.len(), 6);
    // symmetric about the centre
    for (a, b) in peaks.iter().zip(peaks.iter().rev()) {
        assert!((a - 1.0 + (b - 1.0)).abs() < 1e-3);
    }
}

#[test]
fn shooting_rejects_bad_bracket() {
    let u = units();
    let well = ParabolicWell::new(0.0, 10.0, 1.0).unwrap();
    assert!(shoot_eigenstate(&well, 0, (1.0, 0.5), &u).is_err());
    // contains no level
    assert!(shoot_eigenstate(&well, 0, (0.8, 1.0), &u).is_err());
}

#[test]
fn plane_wave_density_is_flat() {
    let p = parse_potential("on [0, 1]: 0").unwrap();
    for m in [Method::Rk4, Method::Numerov] {
        let t = integrate_backward(&p, 1.0, &IntegrationSettings::new(m, 2000).unwrap().recording(), &units()).unwrap();
        let d = density_profile(&t).unwrap();
        assert!(d.iter().all(|v| (v - 1.0).abs() < 1e-12), "{m}");
    }
    assert!(normalize_max(&[0.0, 0.0]).is_err());
}

#[test]
fn resonance_density_matches_eigenstate() {
    let u = units();
    let p = builtin_parabolic();
    let scan = scan_resonances(&p, 0.05, 10.0, 2000, &rk4(), &u, DEFAULT_REFINE_ITERS).unwrap();
    let hw = harmonic_omega_from_parabola(10.0, &u).unwrap();
    let peaks = compare_to_harmonic(&scan.peaks, hw).unwrap();
    let n5 = peaks.iter().find(|p| p.n_match == Some(5)).unwrap();
    let t = integrate_backward(&p, n5.energy, &IntegrationSettings::rk4(2000).unwrap().recording(), &u).unwrap();
    let res = density_peaks(&t.xs, &density_profile(&t).unwrap());
    let well = ParabolicWell::from_potential(&p).unwrap();
    let eig = shoot_level(&well, 5, &u).unwrap();
    let eig_peaks = density_peaks(&eig.xs, &eig.density);
    assert_eq!(res.len(), 6);
    assert_eq!(eig_peaks.len(), 6);
    for (a, b) in res.iter().zip(&eig_peaks) {
        assert!((a - b).abs() < 0.05, "{a} vs {b}");
    }
}
