use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sphereflow::grid::{build_grid, GridSpec, ScalarField};
use sphereflow::spharm::{
    analyze, invert_poisson, laplace_beltrami_spectral, legendre_table, synthesize, synthesize_gradient, ylm,
    LongitudeTransform, SpectralField, TransformPlan,
};
use sphereflow::Error;

fn random_field(lmax: usize, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = SpectralField::zeros(lmax);
    for l in 0..=lmax {
        c.set(l, 0, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        for m in 1..=l as i64 {
            let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            c.set(l, m, a);
            c.set(l, -m, if m % 2 == 0 { a.conj() } else { -a.conj() });
        }
    }
    c
}

fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn low_degree_harmonics_match_closed_forms() {
    let (t, p) = (0.7f64, 1.3f64);
    let y10 = (3.0 / (4.0 * PI)).sqrt() * t.cos();
    assert_abs_diff_eq!(ylm(1, 0, t, p).re, y10, epsilon = 1e-15);
    let y11 = -(3.0 / (8.0 * PI)).sqrt() * t.sin() * Complex64::from_polar(1.0, p);
    assert_abs_diff_eq!((ylm(1, 1, t, p) - y11).norm(), 0.0, epsilon = 1e-15);
    let y1m1 = (3.0 / (8.0 * PI)).sqrt() * t.sin() * Complex64::from_polar(1.0, -p);
    assert_abs_diff_eq!((ylm(1, -1, t, p) - y1m1).norm(), 0.0, epsilon = 1e-15);
    let y20 = (5.0 / (16.0 * PI)).sqrt() * (3.0 * t.cos().powi(2) - 1.0);
    assert_abs_diff_eq!(ylm(2, 0, t, p).re, y20, epsilon = 1e-15);
    let y22 = 0.25 * (15.0 / (2.0 * PI)).sqrt() * t.sin().powi(2) * Complex64::from_polar(1.0, 2.0 * p);
    assert_abs_diff_eq!((ylm(2, 2, t, p) - y22).norm(), 0.0, epsilon = 1e-15);
}

#[test]
fn legendre_derivative_matches_differences() {
    let lmax = 12;
    let h = 1e-5;
    let (p, dp) = legendre_table(lmax, 1.1);
    let (pp, _) = legendre_table(lmax, 1.1 + h);
    let (pm, _) = legendre_table(lmax, 1.1 - h);
    assert_eq!(p.len(), dp.len());
    for k in 0..p.len() {
        assert_abs_diff_eq!(dp[k], (pp[k] - pm[k]) / (2.0 * h), epsilon = 1e-7);
    }
}

#[test]
fn gauss_round_trip_is_exact() {
    let lmax = 24;
    let grid = build_grid(GridSpec::gauss(lmax + 1, 2 * lmax + 1)).unwrap();
    let plan = TransformPlan::new(&grid, lmax);
    let c = random_field(lmax, 7);
    let back = analyze(&synthesize(&c, &plan).unwrap(), &plan).unwrap();
    assert!(max_diff(&c, &back) < 1e-12);
}

#[test]
fn uniform_grid_round_trip() {
    let lmax = 10;
    let grid = build_grid(GridSpec::uniform(2 * lmax + 1, 2 * lmax + 1)).unwrap();
    let plan = TransformPlan::new(&grid, lmax);
    let c = random_field(lmax, 3);
    let back = analyze(&synthesize(&c, &plan).unwrap(), &plan).unwrap();
    assert!(max_diff(&c, &back) < 1e-12);
}

#[test]
fn fft_and_direct_dft_agree() {
    let lmax = 15;
    let grid = build_grid(GridSpec::gauss(20, 33)).unwrap();
    let fft = TransformPlan::new(&grid, lmax);
    let direct = TransformPlan::with_longitude(&grid, lmax, LongitudeTransform::Direct);
    let c = random_field(lmax, 11);
    let a = synthesize(&c, &fft).unwrap();
    let b = synthesize(&c, &direct).unwrap();
    assert!(a.sub(&b).unwrap().max_abs() < 1e-12);
    assert!(max_diff(&analyze(&a, &fft).unwrap(), &analyze(&a, &direct).unwrap()) < 1e-12);
}

#[test]
fn synthesis_matches_direct_evaluation() {
    let lmax = 6;
    let grid = build_grid(GridSpec::gauss(9, 16)).unwrap();
    let plan = TransformPlan::new(&grid, lmax);
    let c = random_field(lmax, 5);
    let f = synthesize(&c, &plan).unwrap();
    let direct = ScalarField::from_fn(&grid, |t, p| c.iter().map(|(l, m, a)| (a * ylm(l, m, t, p)).re).sum());
    assert!(f.sub(&direct).unwrap().max_abs() < 1e-12);
}

#[test]
fn spectral_gradient_of_known_field() {
    let lmax = 4;
    let grid = build_grid(GridSpec::gauss(8, 16)).unwrap();
    let plan = TransformPlan::new(&grid, lmax);
    let f = ScalarField::from_fn(&grid, |t, p| t.sin() * t.cos() * p.cos());
    let (ft, fp) = synthesize_gradient(&analyze(&f, &plan).unwrap(), &plan).unwrap();
    let et = ScalarField::from_fn(&grid, |t, p| (2.0 * t).cos() * p.cos());
    let ep = ScalarField::from_fn(&grid, |t, p| -t.sin() * t.cos() * p.sin());
    assert!(ft.sub(&et).unwrap().max_abs() < 1e-13);
    assert!(fp.sub(&ep).unwrap().max_abs() < 1e-13);
}

#[test]
fn poisson_inverse_round_trip() {
    let mut c = random_field(12, 9);
    c.set(0, 0, Complex64::new(0.0, 0.0));
    let psi = invert_poisson(&c).unwrap();
    let back = laplace_beltrami_spectral(&psi).map(|_, _, a| -a);
    assert!(max_diff(&c, &back) < 1e-14);
    assert_eq!(psi.get(0, 0), Complex64::new(0.0, 0.0));
}

#[test]
fn poisson_rejects_nonzero_mean() {
    let c = SpectralField::single_mode(3, 0, 0, Complex64::new(1.0, 0.0)).unwrap();
    assert!(matches!(invert_poisson(&c), Err(Error::GaussConstraintViolated { .. })));
}

#[test]
fn under_resolved_grid_rejected() {
    let grid = build_grid(GridSpec::gauss(8, 16)).unwrap();
    let plan = TransformPlan::new(&grid, 10);
    let f = ScalarField::zeros(&grid);
    assert!(matches!(analyze(&f, &plan), Err(Error::UnderResolvedGrid { .. })));
}

#[test]
fn asymmetric_coefficients_rejected() {
    let grid = build_grid(GridSpec::gauss(8, 16)).unwrap();
    let plan = TransformPlan::new(&grid, 4);
    let mut c = SpectralField::zeros(4);
    c.set(2, 1, Complex64::new(1.0, 0.0));
    assert!(matches!(synthesize(&c, &plan), Err(Error::SymmetryViolation(_))));
}

#[test]
fn single_mode_validates_indices() {
    assert!(SpectralField::single_mode(3, 4, 0, Complex64::new(1.0, 0.0)).is_err());
    assert!(SpectralField::single_mode(3, 2, 3, Complex64::new(1.0, 0.0)).is_err());
    let c = SpectralField::single_mode(3, 2, -1, Complex64::new(0.5, 0.25)).unwrap();
    assert_eq!(c.symmetry_residue(), 0.0);
}

#[test]
fn csv_round_trip_and_header_check() {
    let c = random_field(6, 1);
    let mut buf = Vec::new();
    c.write_csv(&mut buf).unwrap();
    let back = SpectralField::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back, c);
    assert!(SpectralField::read_csv("a,b\n1,2\n".as_bytes()).is_err());
}
