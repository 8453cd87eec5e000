use approx::assert_relative_eq;
use casimir_core::kernels::{
    inner_moment, kernel_closed, kernel_numeric, kernel_table_csv, log_grid, KernelId, Parity, ORACLE_MIN_T,
};
use casimir_core::quadrature::{integrate_breakpoints, integrate_half_line, Mapping, QuadratureSpec};

#[test]
fn kernel_values_at_origin() {
    let want = [-4.0, 0.0, -12.0, -6.0 * std::f64::consts::PI, 12.0];
    for (n, w) in KernelId::ALL.into_iter().zip(want) {
        let k: f64 = kernel_closed(n, 0.0).unwrap().magnitude;
        assert_relative_eq!(k, w, epsilon = 1e-15);
    }
}

#[test]
fn parity_sets_the_phase() {
    for n in KernelId::ALL {
        let v = kernel_closed(n, 0.7f64).unwrap();
        let z = v.to_complex();
        match n.parity() {
            Parity::Even => assert_eq!(z.im, 0.0),
            Parity::Odd => assert_eq!(z.re, 0.0),
        }
        assert_eq!(n.parity(), if n.n() % 2 == 0 { Parity::Even } else { Parity::Odd });
    }
    assert!(KernelId::new(5).is_err());
}

#[test]
fn large_t_decay() {
    // the arccot terms cancel the leading powers: K3 ~ t^-5, K4 ~ t^-4
    for (n, power) in [(3, 5), (4, 4)] {
        let id = KernelId::new(n).unwrap();
        let a: f64 = kernel_closed(id, 1e3).unwrap().magnitude;
        let b: f64 = kernel_closed(id, 2e3).unwrap().magnitude;
        assert_relative_eq!(a / b, 2f64.powi(power), max_relative = 1e-5);
    }
}

#[test]
fn single_precision_kernels_track_double() {
    for n in KernelId::ALL {
        for t in [0.1, 1.0, 1.9, 2.1, 10.0] {
            let k32 = kernel_closed(n, t as f32).unwrap().magnitude as f64;
            let k64 = kernel_closed(n, t).unwrap().magnitude;
            assert_relative_eq!(k32, k64, epsilon = 1e-5, max_relative = 1e-4);
        }
    }
}

#[test]
fn inner_moment_branches_agree() {
    // Taylor below r = 0.5, recursion above
    for n in KernelId::ALL {
        let below = inner_moment(n, 0.5f64 - 1e-12);
        let above = inner_moment(n, 0.5f64 + 1e-12);
        assert!((below - above).norm() < 1e-11, "n = {}", n.n());
    }
}

#[test]
fn oracle_rejects_small_t() {
    let spec = QuadratureSpec::default();
    assert!(kernel_numeric(KernelId::new(0).unwrap(), ORACLE_MIN_T / 2.0, &spec).is_err());
    assert!(kernel_numeric(KernelId::new(0).unwrap(), f64::NAN, &spec).is_err());
}

#[test]
fn oracle_agrees_below_the_criterion_range() {
    let spec = QuadratureSpec::new(1e-10, 1e-6).max_subdivisions(40_000);
    for n in KernelId::ALL {
        let closed: f64 = kernel_closed(n, 3e-3).unwrap().magnitude;
        let numeric = kernel_numeric(n, 3e-3, &spec).unwrap().magnitude;
        assert_relative_eq!(numeric, closed, epsilon = 1e-5 * (1.0 + closed.abs()));
    }
}

#[test]
fn table_layout() {
    let ts = log_grid(1e-2, 1e2, 5);
    assert_eq!(ts.len(), 5);
    assert_eq!(ts[0], 1e-2);
    assert_eq!(ts[4], 1e2);
    assert_relative_eq!(ts[2], 1.0, max_relative = 1e-15);
    let csv = kernel_table_csv(&ts).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with('#'));
    assert_eq!(lines[1], "t,K0,K1,K2,K3,K4");
    assert_eq!(lines.len(), 7);
    assert!(lines[2..].iter().all(|l| l.split(',').count() == 6));
}

#[test]
fn breakpoints_integrate_an_oscillation() {
    let spec = QuadratureSpec::with_tol(1e-13);
    let f = |x: f64| (50.0 * x).sin() * (-x).exp();
    let exact = 50.0 / 2501.0 * (1.0 - (-10.0f64).exp() * (500.0f64.cos() + 500.0f64.sin() / 50.0));
    let points: Vec<f64> = (0..=40).map(|k| k as f64 * 0.25).collect();
    let split = integrate_breakpoints(f, &points, &spec).unwrap().require_converged(&spec).unwrap();
    assert_relative_eq!(split.value, exact, max_relative = 1e-12);
    assert!(integrate_breakpoints(f, &[1.0, 0.0], &spec).is_err());
    assert!(integrate_breakpoints(f, &[0.0], &spec).is_err());
}

#[test]
fn both_mappings_integrate_gamma() {
    for mapping in [Mapping::Rational, Mapping::Exponential] {
        let spec = QuadratureSpec::with_tol(1e-12).mapping(mapping);
        let r = integrate_half_line(|x: f64| x.powi(5) * (-x).exp(), &spec).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value, 120.0, max_relative = 1e-11);
    }
}
