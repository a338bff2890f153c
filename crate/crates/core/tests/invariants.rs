use barrierscope::analysis::{sweep, sweep_serial};
use barrierscope::potential::expr::{BinOp, Expr, Func};
use barrierscope::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn units() -> UnitSystem {
    UnitSystem::electron()
}

fn gaussian(height: f64, center: f64, width: f64, length: f64) -> Potential {
    parse_potential(&format!("on [0, {length}]: {height} * exp(-((x - {center}) / {width})^2)")).unwrap()
}

/// Smooth and piecewise barriers with V_left = V_right = 0.
fn barrier() -> impl Strategy<Value = Potential> {
    prop_oneof![
        (0.5..12.0f64, 0.5..3.0f64).prop_map(|(h, w)| Potential::parabola(h, w).unwrap()),
        (0.5..8.0f64, 0.2..1.0f64, 0.1..0.5f64).prop_map(|(h, c, s)| gaussian(h, c, s, 1.2)),
        (0.1..3.0f64, 0.2..2.0f64).prop_map(|(h, w)| Potential::square(h, w).unwrap()),
        Just(Potential::arbitrary().with_exterior(0.0, 0.0).unwrap()),
    ]
}

/// Barriers without left-right symmetry.
fn asymmetric() -> impl Strategy<Value = Potential> {
    prop_oneof![
        (0.5..8.0f64, 0.2..0.6f64, 0.1..0.4f64).prop_map(|(h, c, s)| gaussian(h, c, s, 1.5)),
        (0.5..4.0f64, 0.5..4.0f64).prop_map(|(a, b)| {
            parse_potential(&format!("on [0, 0.4): {a}\non [0.4, 1]: {b} * (1 - x)")).unwrap()
        }),
        (0.5..6.0f64, 0.1..0.9f64).prop_map(|(a, t)| {
            parse_potential(&format!("on [0, {t}): {a} * x / {t}\non [{t}, 1]: {a} * (1 - x) / (1 - {t})")).unwrap()
        }),
        Just(Potential::arbitrary().with_exterior(0.0, 0.0).unwrap()),
    ]
}

fn continuous(p: &Potential) -> bool {
    p.segments().windows(2).all(|w| {
        let x = w[0].end;
        (p.evaluate(x - 1e-12).unwrap() - p.evaluate(x).unwrap()).abs() < 1e-9
    })
}

/// Largest sqrt(|g|) over the barrier, in 1/nm.
fn local_wavenumber_max(p: &Potential, e: f64) -> f64 {
    let c = units().hbar2_over_2m();
    (0..=512)
        .map(|i| p.evaluate(p.length() * i as f64 / 512.0).unwrap())
        .chain([p.v_left(), p.v_right()])
        .map(|v| ((e - v).abs() / c).sqrt())
        .fold(1e-3, f64::max)
}

fn method() -> impl Strategy<Value = Method> {
    prop_oneof![Just(Method::Rk4), Just(Method::Numerov)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wavevector_depends_on_difference_only(e in -20.0..20.0f64, v in -20.0..20.0f64, c in -10.0..10.0f64) {
        prop_assume!((e - v).abs() > 0.01);
        let a = wavevector(e, v, &units());
        let b = wavevector(e + c, v + c, &units());
        prop_assert_eq!(a.regime, b.regime);
        prop_assert!((a.value - b.value).abs() <= 1e-9 * a.value);
    }

    #[test]
    fn wavevector_monotone(v in -5.0..5.0f64, d1 in 0.0..10.0f64, d2 in 0.0..10.0f64) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let k1 = wavevector(v + lo, v, &units()).value;
        let k2 = wavevector(v + hi, v, &units()).value;
        prop_assert!(k1 <= k2);
    }

    #[test]
    fn wronskian_is_constant(p in barrier(), frac in 0.02..2.0f64, steps in 500usize..3000, m in method()) {
        let e = frac * p.sampled_max(256).max(0.5);
        // the drift is truncation error, ~(κh)⁴; 1e-7 needs κh below ~0.05
        prop_assume!(local_wavenumber_max(&p, e) * p.length() / steps as f64 <= 0.05);
        // Numerov rebuilds ψ' from g differences, which straddle an interior jump
        prop_assume!(m == Method::Rk4 || continuous(&p));
        let s = IntegrationSettings::new(m, steps).unwrap().recording();
        let t = integrate_backward(&p, e, &s, &units()).unwrap();
        let w_ref = t.wronskian(t.len() - 1);
        prop_assert!(w_ref > 0.0);
        // deep tunnelling: |ψ|² ≫ W and rounding alone swamps 1e-7
        let peak = t.psi.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        prop_assume!(peak / w_ref < 1e6);
        for i in 0..t.len() {
            let w = t.wronskian(i);
            prop_assert!((w - w_ref).abs() <= 1e-7 * w_ref, "i={} W={} W(L)={}", i, w, w_ref);
        }
    }

    #[test]
    fn integration_is_linear(
        p in barrier(), frac in 0.05..2.0f64, re in -3.0..3.0f64, im in -3.0..3.0f64, m in method()
    ) {
        let c = Complex64::new(re, im);
        prop_assume!(c.norm() > 1e-3);
        let e = frac * p.sampled_max(256).max(0.5);
        let s = IntegrationSettings::new(m, 700).unwrap().recording();
        let (psi_l, dpsi_l) = initial_conditions(&p, e, &units()).unwrap();
        let base = integrate::integrate_from(&p, e, &s, &units(), psi_l, dpsi_l).unwrap();
        let scaled = integrate::integrate_from(&p, e, &s, &units(), c * psi_l, c * dpsi_l).unwrap();
        let kappa = local_wavenumber_max(&p, e);
        for i in 0..base.len() {
            // relative to the local state |ψ| + |ψ'|/κ: |ψ| alone can dip
            // far below its exponential components
            let state = c.norm() * (base.psi[i].norm() + base.dpsi[i].norm() / kappa);
            prop_assert!((scaled.psi[i] - c * base.psi[i]).norm() <= 1e-12 * state);
            prop_assert!((scaled.dpsi[i] - c * base.dpsi[i]).norm() <= 1e-12 * kappa * state);
        }
    }

    #[test]
    fn mirror_reciprocity(p in asymmetric(), frac in 0.05..1.5f64) {
        let e = frac * p.sampled_max(256);
        let q = p.mirrored();
        let tmm = |p: &Potential| solve_transfer_matrix(p, e, 2000, &units()).unwrap().transmission;
        prop_assert!((tmm(&p) - tmm(&q)).abs() <= 1e-8);
        // RK4 samples V as-is, so a jump costs O(h); only continuous barriers here
        prop_assume!(continuous(&p));
        let s = IntegrationSettings::rk4(4000).unwrap();
        let back = |p: &Potential| solve_backward(p, e, &s, &units()).unwrap().transmission;
        prop_assert!((back(&p) - back(&q)).abs() <= 1e-8, "{} vs {}", back(&p), back(&q));
    }

    #[test]
    fn flux_factor_with_raised_exit(
        p in barrier(), v_right in -2.0..2.0f64, frac in 0.1..2.0f64, m in method()
    ) {
        prop_assume!(v_right.abs() > 1e-3);
        let p = p.with_exterior(0.0, v_right).unwrap();
        let e = v_right.max(0.0) + 0.05 + frac * p.sampled_max(256).max(0.5);
        for s in [
            solve_backward(&p, e, &IntegrationSettings::new(m, 1500).unwrap(), &units()).unwrap(),
            solve_transfer_matrix(&p, e, 300, &units()).unwrap(),
        ] {
            let raw = s.k_out.value * s.f.norm_sqr() / (s.k_in.value * s.a.norm_sqr());
            prop_assert!((s.transmission - raw).abs() <= 1e-12 * raw.max(1e-300));
            prop_assert!((s.flux_transmission() - raw).abs() <= 1e-12 * raw.max(1e-300));
            prop_assert!((s.transmission + s.reflection - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn wkb_never_exceeds_one(p in barrier(), frac in 0.01..2.0f64) {
        let e = frac * p.sampled_max(256).max(0.5);
        let t = solve_wkb(&p, e, 400, &units()).unwrap().transmission;
        prop_assert!((0.0..=1.0).contains(&t));
    }

    #[test]
    fn parallel_sweep_matches_serial(p in barrier(), n in 2usize..40, solver_pick in 0usize..3) {
        let solver = [
            Solver::Backward(IntegrationSettings::numerov(300).unwrap()),
            Solver::TransferMatrix { slices: 200 },
            Solver::Wkb { quad_points: 200 },
        ][solver_pick];
        let top = 2.0 * p.sampled_max(256).max(0.5);
        let a = sweep(&p, 0.01, top, n, &solver, &units()).unwrap();
        let b = sweep_serial(&p, 0.01, top, n, &solver, &units()).unwrap();
        prop_assert_eq!(a.energies.len(), b.energies.len());
        for (x, y) in a.transmission.iter().zip(&b.transmission) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
        let again = sweep(&p, 0.01, top, n, &solver, &units()).unwrap();
        prop_assert_eq!(a, again);
    }
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-9.0..9.0f64).prop_map(Expr::Num),
        (-1.0e3..1.0e3f64).prop_map(Expr::Num),
        (1e-6..1e-3f64).prop_map(Expr::Num),
        Just(Expr::X),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div)], inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| Expr::Bin(op, Box::new(a), Box::new(b))),
            (inner.clone(), 0u32..4).prop_map(|(a, k)| Expr::Bin(BinOp::Pow, Box::new(a), Box::new(Expr::Num(k as f64)))),
            (prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Abs)], inner.clone())
                .prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
            inner.clone().prop_map(|a| Expr::Call(Func::Exp, Box::new(Expr::Call(Func::Sin, Box::new(a))))),
            inner.prop_map(|a| Expr::Call(Func::Sqrt, Box::new(Expr::Call(Func::Abs, Box::new(a))))),
        ]
    })
}

fn segment_form() -> impl Strategy<Value = SegmentForm> {
    prop_oneof![
        (-50.0..50.0f64).prop_map(SegmentForm::Constant),
        prop::collection::vec(-20.0..20.0f64, 1..5).prop_map(SegmentForm::Polynomial),
        expr().prop_map(SegmentForm::Expression),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn render_parse_round_trip(
        forms in prop::collection::vec(segment_form(), 1..4),
        widths in prop::collection::vec(0.05..2.0f64, 4),
        v_left in -3.0..3.0f64,
        v_right in -3.0..3.0f64,
    ) {
        let mut segs = Vec::new();
        let mut x = 0.0;
        for (form, w) in forms.into_iter().zip(widths) {
            segs.push(Segment::new(x, x + w, form));
            x += w;
        }
        let p = Potential::new(segs, v_left, v_right);
        prop_assume!(p.is_ok());
        let p = p.unwrap();
        let text = render_potential(&p);
        let q = parse_potential(&text).unwrap();
        prop_assert_eq!(q.v_left(), v_left);
        prop_assert_eq!(q.v_right(), v_right);
        let len = p.length();
        for i in 0..1000 {
            let x = (len * i as f64 / 999.0).min(len);
            let (a, b) = (p.evaluate(x).unwrap(), q.evaluate(x).unwrap());
            prop_assert!(
                (a - b).abs() <= 1e-12 * a.abs().max(1.0) || (a.is_nan() && b.is_nan()),
                "x={} {} vs {}\n{}", x, a, b, text
            );
        }
    }
}

/// Slope of log(error) against log(steps) by least squares.
fn fitted_order(steps: &[usize], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = steps.iter().map(|&s| (s as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -cov / var
}

#[test]
fn fourth_order_convergence() {
    let u = units();
    let cases = [(builtin_parabolic(), 3.3), (gaussian(4.0, 0.6, 0.25, 1.2), 2.0), (builtin_parabolic(), 11.0)];
    let steps = [50, 100, 200, 400];
    for (p, e) in cases {
        for m in [Method::Rk4, Method::Numerov] {
            let reference = integrate_backward(&p, e, &IntegrationSettings::new(m, 100_000).unwrap(), &u).unwrap();
            let (psi_ref, dpsi_ref) = reference.start();
            let errors: Vec<f64> = steps
                .iter()
                .map(|&n| {
                    let t = integrate_backward(&p, e, &IntegrationSettings::new(m, n).unwrap(), &u).unwrap();
                    let (psi, dpsi) = t.start();
                    ((psi - psi_ref).norm() / psi_ref.norm()).max((dpsi - dpsi_ref).norm() / dpsi_ref.norm())
                })
                .collect();
            let order = fitted_order(&steps, &errors);
            assert!((order - 4.0).abs() <= 0.5, "{m} E={e}: order {order}, errors {errors:?}");
        }
    }
}

fn unitarity_grid(p: &Potential) -> Vec<f64> {
    let lo = p.v_left().max(p.v_right()) + 0.01;
    let hi = 2.0 * p.sampled_max(1000);
    (0..100).map(|i| lo + (hi - lo) * i as f64 / 99.0).collect()
}

#[test]
fn unitarity_on_builtins() {
    let u = units();
    let potentials = [
        builtin_parabolic(),
        Potential::square(1.0, 1.0).unwrap(),
        Potential::double_barrier(0.3, 1.0, 5.0).unwrap(),
        Potential::arbitrary(),
        Potential::square(2.0, 0.5).unwrap().with_exterior(0.5, -0.3).unwrap(),
    ];
    for p in &potentials {
        for e in unitarity_grid(p) {
            for m in [Method::Rk4, Method::Numerov] {
                let s = solve_backward(p, e, &IntegrationSettings::new(m, 2000).unwrap(), &u).unwrap();
                assert!((s.transmission + s.reflection - 1.0).abs() < 1e-6, "{m} E={e}: {s:?}");
            }
            let s = solve_transfer_matrix(p, e, 1000, &u).unwrap();
            assert!((s.transmission + s.reflection - 1.0).abs() < 1e-6, "tmm E={e}");
        }
    }
}

#[test]
fn tmm_converges_to_backward() {
    let u = units();
    let p = builtin_parabolic();
    let grid = unitarity_grid(&p);
    let reference: Vec<f64> = grid
        .iter()
        .map(|&e| solve_backward(&p, e, &IntegrationSettings::rk4(2000).unwrap(), &u).unwrap().transmission)
        .collect();
    let mut last = f64::INFINITY;
    for slices in [10, 20, 50, 100, 200, 500, 1000, 2000] {
        let err = grid
            .iter()
            .zip(&reference)
            .map(|(&e, t)| (solve_transfer_matrix(&p, e, slices, &u).unwrap().transmission - t).abs())
            .fold(0.0, f64::max);
        assert!(err < last, "slices={slices}: {err} not below {last}");
        last = err;
    }
    assert!(last < 1e-4, "final agreement {last}");
}
