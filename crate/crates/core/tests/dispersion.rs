use casimir_core::dispersion::{
    compute_s, kappa_dimensionless, polarization_sum_check, potential_curve, s_targets, Convention, CurveMetadata,
    DipoleMoments, KappaReport, Scheme, UnitSystem,
};
use casimir_core::exact::PolynomialFamily;
use casimir_core::output::to_json_pretty;
use casimir_core::quadrature::QuadratureSpec;

#[test]
fn s_values_in_single_precision() {
    let spec = QuadratureSpec::<f32>::new(1e-5, 1e-5);
    for (fam, target) in PolynomialFamily::ALL.iter().zip(s_targets()) {
        let s = compute_s(&fam.table(), &spec).unwrap();
        let want: f32 = target.to_float();
        assert!(((s - want) / want).abs() < 1e-4, "{}: {s} vs {want}", fam.name());
    }
}

#[test]
fn polarization_sums_over_directions() {
    for i in 0..20 {
        let th = 0.31 * i as f64;
        let ph = 0.77 * i as f64;
        let k1 = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
        let k2 = [0.0, (0.4 * i as f64).sin(), (0.4 * i as f64).cos()];
        let u: f64 = k1.iter().zip(&k2).map(|(a, b)| a * b).sum();
        let (t, l) = polarization_sum_check(&k1, &k2).unwrap();
        assert!((t - (1.0 + u * u)).abs() < 1e-13);
        assert!((l - (1.0 - u * u)).abs() < 1e-13);
    }
    assert!(polarization_sum_check(&[1.0, 1.0, 0.0], &[0.0, 0.0, 1.0]).is_err());
}

#[test]
fn kappa_is_quadratic_in_the_moments() {
    let base = DipoleMoments::<f64>::new(4.5, -1.3e-5, Convention::PaperFactor2);
    let k = kappa_dimensionless(&base);
    let scaled = kappa_dimensionless(&DipoleMoments::new(2.0 * base.alpha_e, 2.0 * base.alpha_m, base.convention));
    assert!((scaled.total / k.total - 4.0).abs() < 1e-14);
    assert!((k.ee + k.em + k.mm - k.total).abs() < 1e-14 * k.total);
    let flipped = kappa_dimensionless(&DipoleMoments::new(base.alpha_e, -base.alpha_m, base.convention));
    assert_eq!(flipped.ee, k.ee);
    assert_eq!(flipped.mm, k.mm);
    assert_eq!(flipped.em, -k.em);
}

#[test]
fn unit_file_parsing() {
    let good = "# test\nalpha_fs = 0.5\nelectron_mass_energy = 4\nbohr_radius = 2\ncompton_length = 1\ncutoff_ratio = 1\nenergy_unit = x\nlength_unit = y\n";
    let u = UnitSystem::<f64>::from_key_values(good).unwrap();
    assert_eq!(u.energy_scale(), 2.0);
    assert_eq!(u.cutoff_inverse_bohr(), 2.0);
    assert!(UnitSystem::<f64>::from_key_values(&good.replace("bohr_radius = 2", "bohr_radius = 3")).is_err());
    assert!(UnitSystem::<f64>::from_key_values(&format!("{good}colour = red\n")).is_err());
    assert!(UnitSystem::<f64>::from_key_values(&good.replace("cutoff_ratio = 1\n", "")).is_err());
    assert!(UnitSystem::<f64>::from_key_values(&good.replace("alpha_fs = 0.5", "alpha_fs 0.5")).is_err());
    assert!(UnitSystem::<f64>::from_key_values(&good.replace("alpha_fs = 0.5", "alpha_fs = -0.5")).is_err());
}

#[test]
fn si_and_atomic_curves_differ_by_the_energy_scale() {
    let si = UnitSystem::<f64>::codata();
    let au = UnitSystem::hartree(si.alpha_fs).unwrap();
    let a = potential_curve(10.0, 100.0, 11, 37.0, &au).unwrap();
    let b = potential_curve(10.0, 100.0, 11, 37.0, &si).unwrap();
    // alpha m c^2 is 1/alpha hartree; the curves differ by a hartree in eV
    assert!((au.energy_scale() * si.alpha_fs - 1.0).abs() < 1e-15);
    let hartree_ev = si.energy_scale() * si.alpha_fs;
    assert!((hartree_ev - 27.211_386_245_988).abs() < 1e-6, "{hartree_ev}");
    for (x, y) in a.delta_e.iter().zip(&b.delta_e) {
        assert!((y / x - hartree_ev).abs() < 1e-12 * hartree_ev);
    }
    assert_eq!(a.r, b.r);
    assert!(potential_curve(10.0, 10.0, 5, 37.0, &au).is_err());
    assert!(potential_curve(10.0, 20.0, 1, 37.0, &au).is_err());
}

#[test]
fn curve_csv_layout() {
    let units = UnitSystem::<f64>::codata();
    let c = potential_curve(1.0, 1e3, 4, 37.0, &units).unwrap();
    let csv = c.to_csv(&CurveMetadata {
        kappa: 37.0,
        scheme: Scheme::ThisPaper,
        convention: Convention::PaperFactor2,
        units: &units,
    });
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# kappa=3.7"));
    assert!(lines[0].contains("energy_unit=eV"));
    assert_eq!(lines[1], "R_over_rB,delta_E");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[5].split(',').next().unwrap(), "1.0000000000000000e3");
}

#[test]
fn kappa_report_carries_exact_coefficients() {
    let m = DipoleMoments::new(4.5, 0.0, Convention::NoFactor2);
    let k = kappa_dimensionless(&m);
    let json = to_json_pretty(&KappaReport::new(&m, &k));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["convention"], "no-factor-2");
    assert_eq!(v["coefficients"][0], "23/4*pi^-1");
    assert_eq!(v["mm"].as_f64(), Some(0.0));
}
