use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use sphereflow::exact::{self, BasicSolutionParams};
use sphereflow::grid::{build_grid, Band, GridSpec};
use sphereflow::verify::{
    band_samples, check_f_of_psi_equals_sin2, check_gauss_constraint, check_gg_ode, check_harmonic_vorticity,
    check_mercator_obstruction, check_theorem2_relations, check_vanishing_jacobian, gg_ode_residuals,
    global_harmonic_nullspace, mercator_obstruction_values, near_pole_warning, run_suite, theorem2_profile_residuals,
    write_reports, CheckReport, PhiProfile, SuiteConfig,
};
use sphereflow::Error;

#[test]
fn report_pass_flag_and_csv() {
    let r = CheckReport::new("x", 2e-5, (8, 16), (0.1, 0.2), 1e-4);
    assert!(r.pass);
    assert!(!CheckReport::new("x", f64::NAN, (8, 16), (0.1, 0.2), 1e-4).pass);
    let mut buf = Vec::new();
    write_reports(&[r], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "name,nlat,nlon,band_lo,band_hi,max_abs_residual,tolerance,pass");
    assert_eq!(
        lines.next().unwrap(),
        "x,8,16,1.0000000000000001e-1,2.0000000000000001e-1,2.0000000000000002e-5,1.0000000000000000e-4,true"
    );
}

#[test]
fn zonal_checks_on_basic_solution() {
    let g = build_grid(GridSpec::gauss(64, 128)).unwrap();
    let p = BasicSolutionParams::default();
    let psi = exact::psi_field(&g, p);
    let omega = exact::omega_field(&g, p);
    assert!(check_vanishing_jacobian(&psi, &omega, Band::DEFAULT, 1e-12).unwrap().pass);
    assert!(check_harmonic_vorticity(&omega, Band::DEFAULT, 1e-4).pass);
    assert!(check_gauss_constraint(&omega, 0.0, 1e-8).pass);
}

#[test]
fn harmonicity_residual_grows_toward_pole() {
    let g = build_grid(GridSpec::gauss(64, 128)).unwrap();
    let omega = exact::omega_field(&g, BasicSolutionParams::default());
    let wide = check_harmonic_vorticity(&omega, Band::new(0.01, PI - 0.01).unwrap(), 1e-4);
    let narrow = check_harmonic_vorticity(&omega, Band::DEFAULT, 1e-4);
    assert!(wide.max_abs_residual > narrow.max_abs_residual);
    assert!(near_pole_warning(Band::new(0.01, 3.0).unwrap()).is_some());
    assert!(near_pole_warning(Band::DEFAULT).is_none());
}

#[test]
fn nullspace_is_constants() {
    for l in [1, 5, 20] {
        assert_eq!(global_harmonic_nullspace(l), 1);
    }
    assert_eq!(global_harmonic_nullspace(0), 1);
}

#[test]
fn gg_ode_contrast() {
    let samples: Vec<f64> = (-10..=10).map(|k| k as f64 / 8.0).collect();
    for k1 in [1.0, 0.5, -3.0] {
        let r = check_gg_ode(|w| PhiProfile::Cosh2.eval(w, k1), &samples, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
    }
    let exp = PhiProfile::Exponential { a: 2.0, b: 3.0 };
    let r = gg_ode_residuals(|w| exp.eval(w, 1.0), &samples).unwrap();
    assert!(r.iter().all(|v| (v + 2.0).abs() < 1e-8));
    assert!(!check_gg_ode(|w| exp.eval(w, 1.0), &samples, 1e-8).unwrap().pass);
}

#[test]
fn gg_ode_rejects_nonpositive_profile() {
    let r = check_gg_ode(|w: f64| w, &[0.5, 0.0], 1e-8);
    assert!(matches!(r, Err(Error::NonpositivePhi { .. })));
}

#[test]
fn mercator_obstruction_shape() {
    let v = mercator_obstruction_values(&[0.0, 1.5, -1.5, 9.0]).unwrap();
    assert_abs_diff_eq!(v[0], -1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(v[1], v[2], epsilon = 1e-9);
    assert!(v[3].abs() < 1e-6);
    let chis: Vec<f64> = (-50..=50).map(|k| k as f64 / 10.0).collect();
    assert!(check_mercator_obstruction(&chis, 1e-6).unwrap().pass);
    assert!(check_mercator_obstruction(&[3.0, 4.0], 1e-6).is_err());
    assert!(check_mercator_obstruction(&[0.0, 11.0], 1e-6).is_err());
}

#[test]
fn theorem2_at_equator_and_sign_flip() {
    let near_eq = [PI / 2.0 - 0.01, PI / 2.0 + 0.013];
    let (a, b) = theorem2_profile_residuals(BasicSolutionParams::default(), &near_eq).unwrap();
    assert!(a.iter().chain(&b).all(|r| *r < 1e-4));
    let thetas = band_samples(Band::DEFAULT, 64);
    let plus = theorem2_profile_residuals(BasicSolutionParams::new(1.0, 0.0), &thetas).unwrap();
    let minus = theorem2_profile_residuals(BasicSolutionParams::new(-1.0, 0.0), &thetas).unwrap();
    for (x, y) in plus.0.iter().zip(&minus.0) {
        assert_abs_diff_eq!(x, y, epsilon = 1e-6);
    }
    assert!(theorem2_profile_residuals(BasicSolutionParams::new(0.0, 0.0), &thetas).is_err());
    assert!(theorem2_profile_residuals(BasicSolutionParams::new(1.0, 0.2), &thetas).is_err());
}

#[test]
fn theorem2_reports() {
    let r = check_theorem2_relations(BasicSolutionParams::default(), 256, GridSpec::gauss(128, 256), Band::DEFAULT)
        .unwrap();
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|r| r.pass), "{r:?}");
}

#[test]
fn sin2_consistency() {
    let r = check_f_of_psi_equals_sin2(BasicSolutionParams::new(-2.0, 0.0), 512, GridSpec::gauss(32, 64)).unwrap();
    assert!(r.pass);
    assert_eq!(r.max_abs_residual, 0.0);
}

#[test]
fn suite_passes_at_moderate_resolution_and_rejects_offset() {
    let cfg = SuiteConfig { grid: GridSpec::gauss(128, 256), lmax: 20, n_theta: 512, ..Default::default() };
    assert!(run_suite(&cfg).unwrap().iter().all(|r| r.pass));
    let bad = SuiteConfig { params: BasicSolutionParams::new(1.0, 0.5), ..cfg.clone() };
    assert!(run_suite(&bad).is_err());
    let exp = SuiteConfig { phi: PhiProfile::Exponential { a: 0.5, b: -1.0 }, ..cfg };
    let reports = run_suite(&exp).unwrap();
    let gg = reports.iter().find(|r| r.name == "gg_ode").unwrap();
    assert!(!gg.pass);
    assert_abs_diff_eq!(gg.max_abs_residual, 2.0, epsilon = 1e-8);
}
