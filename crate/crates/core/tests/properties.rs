use num_complex::Complex64;
use proptest::prelude::*;

use sphereflow::exact::{omega_basic, u_phi_basic, BasicSolutionParams};
use sphereflow::grid::{build_grid, colatitude_of_mercator, mercator_of_colatitude, GridSpec, ScalarField};
use sphereflow::operators::jacobian;
use sphereflow::spharm::{analyze, synthesize, SpectralField, TransformPlan};

fn real_field(lmax: usize, vals: &[(f64, f64)]) -> SpectralField {
    let mut c = SpectralField::zeros(lmax);
    let mut it = vals.iter().cycle();
    for l in 0..=lmax {
        c.set(l, 0, Complex64::new(it.next().unwrap().0, 0.0));
        for m in 1..=l as i64 {
            let &(re, im) = it.next().unwrap();
            let a = Complex64::new(re, im);
            c.set(l, m, a);
            c.set(l, -m, if m % 2 == 0 { a.conj() } else { -a.conj() });
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_any_band_limited_field(
        lmax in 1usize..12,
        vals in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..40),
    ) {
        let c = real_field(lmax, &vals);
        let grid = build_grid(GridSpec::gauss((lmax + 1).max(4), (2 * lmax + 2).max(4))).unwrap();
        let plan = TransformPlan::new(&grid, lmax);
        let back = analyze(&synthesize(&c, &plan).unwrap(), &plan).unwrap();
        for (a, b) in c.coeffs().iter().zip(back.coeffs()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn mercator_round_trip(theta in 1e-6f64..(std::f64::consts::PI - 1e-6)) {
        let chi = mercator_of_colatitude(theta).unwrap();
        prop_assert!((colatitude_of_mercator(chi) - theta).abs() < 1e-12);
    }

    #[test]
    fn basic_solution_family_is_linear(
        k1 in -5.0f64..5.0, k2 in -5.0f64..5.0, theta in 0.01f64..3.13,
    ) {
        let p = BasicSolutionParams::new(k1, k2);
        let unit = BasicSolutionParams::new(1.0, 0.0);
        let w = omega_basic(theta, p).unwrap();
        prop_assert!((w - (k1 * omega_basic(theta, unit).unwrap() + k2)).abs() < 1e-12);
        prop_assert!((u_phi_basic(theta, p) - k1 * u_phi_basic(theta, unit)).abs() < 1e-12);
    }

    #[test]
    fn jacobian_of_zonal_pair_vanishes(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let grid = build_grid(GridSpec::uniform(16, 16)).unwrap();
        let f = ScalarField::zonal(&grid, |t| (a * t).sin());
        let g = ScalarField::zonal(&grid, |t| (b * t).cos() + t);
        prop_assert_eq!(jacobian(&f, &g).unwrap().max_abs(), 0.0);
    }
}
