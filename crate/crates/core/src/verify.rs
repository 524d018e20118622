//! Numerical checks of the identities behind the nonexistence results:
//! vanishing advection, harmonic vorticity, the Φ-equation, the Mercator
//! obstruction and the G(ψ) relations.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::exact::{self, BasicSolutionParams};
use crate::grid::{build_grid, sci, surface_integral, Band, GridSpec, ScalarField};
use crate::operators::{d_phi, jacobian, laplace_beltrami_fd, mercator_laplacian, ns_residual, MercatorPatch};
use crate::par;
use crate::quadrature;
use crate::spharm::{laplace_beltrami_spectral, SpectralField};
use crate::stencil::centered_d1_6;
use crate::tolerances as tol;

/// Outcome of one check. `pass` is exactly `max_abs_residual <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub max_abs_residual: f64,
    /// (nlat, nlon) for grid checks; (samples, 1) for profile checks.
    pub resolution: (usize, usize),
    /// θ-band for grid checks; sample range for profile checks.
    pub domain: (f64, f64),
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(name: &str, max_abs_residual: f64, resolution: (usize, usize), domain: (f64, f64), tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            max_abs_residual,
            resolution,
            domain,
            tolerance,
            pass: max_abs_residual <= tolerance,
        }
    }

    fn on_grid(name: &str, field: &ScalarField, band: Band, residual: f64, tolerance: f64) -> Self {
        let g = field.grid();
        Self::new(name, residual, (g.nlat(), g.nlon()), (band.lo, band.hi), tolerance)
    }
}

/// Writes `name,nlat,nlon,band_lo,band_hi,max_abs_residual,tolerance,pass`.
pub fn write_reports<W: Write>(reports: &[CheckReport], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["name", "nlat", "nlon", "band_lo", "band_hi", "max_abs_residual", "tolerance", "pass"])?;
    for r in reports {
        out.write_record([
            r.name.clone(),
            r.resolution.0.to_string(),
            r.resolution.1.to_string(),
            sci(r.domain.0),
            sci(r.domain.1),
            sci(r.max_abs_residual),
            sci(r.tolerance),
            r.pass.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// max |ψ_φ ω_θ − ψ_θ ω_φ| over the band.
pub fn check_vanishing_jacobian(psi: &ScalarField, omega: &ScalarField, band: Band, tolerance: f64) -> Result<CheckReport> {
    let j = jacobian(psi, omega)?;
    Ok(CheckReport::on_grid("vanishing_jacobian", psi, band, j.max_abs_in_band(band), tolerance))
}

/// max |∇̃²ω| (finite differences) over the band.
pub fn check_harmonic_vorticity(omega: &ScalarField, band: Band, tolerance: f64) -> CheckReport {
    let lap = laplace_beltrami_fd(omega);
    CheckReport::on_grid("harmonic_vorticity", omega, band, lap.max_abs_in_band(band), tolerance)
}

/// max |(1/sin θ)J(ψ, ω) − ν∇̃²ω| over the band.
pub fn check_ns_residual(psi: &ScalarField, omega: &ScalarField, nu: f64, band: Band, tolerance: f64) -> Result<CheckReport> {
    let r = ns_residual(psi, omega, nu)?;
    Ok(CheckReport::on_grid("ns_residual", psi, band, r.max_abs_in_band(band), tolerance))
}

/// |∫∫ω dA − 4πK₂|.
pub fn check_gauss_constraint(omega: &ScalarField, k2: f64, tolerance: f64) -> CheckReport {
    let r = (surface_integral(omega) - 4.0 * PI * k2).abs();
    CheckReport::on_grid("gauss_constraint", omega, Band::FULL, r, tolerance)
}

/// Dimension of the kernel of the spectral Laplace–Beltrami operator on
/// degrees ≤ `lmax`, found by applying it to every basis coefficient.
pub fn global_harmonic_nullspace(lmax: usize) -> usize {
    let mut kernel = 0;
    let mut probe = SpectralField::zeros(lmax);
    let one = num_complex::Complex64::new(1.0, 0.0);
    for l in 0..=lmax {
        for m in -(l as i64)..=l as i64 {
            probe.set(l, m, one);
            if laplace_beltrami_spectral(&probe).max_abs() == 0.0 {
                kernel += 1;
            }
            probe.set(l, m, num_complex::Complex64::new(0.0, 0.0));
        }
    }
    kernel
}

/// Signed residuals r(ω) = (Φ′/Φ)′(ω) Φ(ω) − 2, with both derivatives taken
/// by sixth-order centered differences of step [`tol::GG_STEP`].
pub fn gg_ode_residuals<F>(phi: F, samples: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64 + Sync,
{
    let h = tol::GG_STEP;
    for &w in samples {
        for k in -6..=6 {
            let x = w + k as f64 * h;
            let v = phi(x);
            if !(v > 0.0) {
                return Err(Error::NonpositivePhi { value: v, at: x });
            }
        }
    }
    let log_slope = |x: f64| centered_d1_6(&phi, x, h) / phi(x);
    Ok(par::map_slice(samples, |&w| centered_d1_6(&log_slope, w, h) * phi(w) - 2.0))
}

/// Report for (Φ′/Φ)′Φ = 2 on the given ω samples.
pub fn check_gg_ode<F>(phi: F, samples: &[f64], tolerance: f64) -> Result<CheckReport>
where
    F: Fn(f64) -> f64 + Sync,
{
    let r = gg_ode_residuals(phi, samples)?;
    let worst = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(CheckReport::new("gg_ode", worst, (samples.len(), 1), sample_range(samples), tolerance))
}

fn sample_range(samples: &[f64]) -> (f64, f64) {
    samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Δ_{χφ} ln sech χ at each sample, from [`mercator_laplacian`] on a small
/// longitude-periodic patch with χ-step [`tol::MERCATOR_STEP`].
pub fn mercator_obstruction_values(chi_samples: &[f64]) -> Result<Vec<f64>> {
    let h = tol::MERCATOR_STEP;
    let log_sech = |c: f64| -> f64 {
        // ln sech χ = −|χ| − ln(1 + e^{−2|χ|}) + ln 2, stable for large |χ|
        let a = c.abs();
        -a - (-2.0 * a).exp().ln_1p() + std::f64::consts::LN_2
    };
    let values = par::map_slice(chi_samples, |&c| {
        MercatorPatch::from_fn(c - 2.0 * h, h, 5, 4, |x, _| log_sech(x)).map(|p| mercator_laplacian(&p).get(2, 0))
    });
    values.into_iter().collect()
}

/// Checks Δ_{χφ} ln sech χ = −sech²χ on the samples. Errors unless the
/// samples include a point where the obstruction exceeds
/// [`tol::MERCATOR_OBSTRUCTION_FLOOR`], i.e. near the equator.
pub fn check_mercator_obstruction(chi_samples: &[f64], tolerance: f64) -> Result<CheckReport> {
    if chi_samples.iter().any(|c| c.abs() > 10.0) {
        return Err(Error::InvalidParams("mercator samples must satisfy |chi| <= 10".into()));
    }
    let sech2 = |c: f64| 1.0 / c.cosh().powi(2);
    let obstruction = chi_samples.iter().fold(0.0f64, |m, &c| m.max(sech2(c)));
    if obstruction <= tol::MERCATOR_OBSTRUCTION_FLOOR {
        return Err(Error::InvalidParams(format!(
            "samples never reach the equator: max sech^2 = {obstruction}"
        )));
    }
    let values = mercator_obstruction_values(chi_samples)?;
    let worst = values
        .iter()
        .zip(chi_samples)
        .fold(0.0f64, |m, (v, &c)| m.max((v + sech2(c)).abs()));
    Ok(CheckReport::new("mercator_obstruction", worst, (chi_samples.len(), 1), sample_range(chi_samples), tolerance))
}

/// Cell-centred samples of `band`.
pub fn band_samples(band: Band, n: usize) -> Vec<f64> {
    let h = (band.hi - band.lo) / n as f64;
    (0..n).map(|k| band.lo + (k as f64 + 0.5) * h).collect()
}

/// Per-sample relative residuals of |∇ψ|² = GG′/G″ and |∇ω|² = G(G′)³/G″
/// along the profile, where G = ω∘ψ⁻¹ is differentiated through its
/// θ-parametrisation: G′ = ω_θ/ψ_θ, G″ = (G′)_θ/ψ_θ.
pub fn theorem2_profile_residuals(p: BasicSolutionParams, thetas: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    p.k1.ne(&0.0)
        .then_some(())
        .ok_or_else(|| Error::InvalidParams("K1 must be nonzero".into()))?;
    if p.k2 != 0.0 {
        return Err(Error::InvalidParams("theorem-2 relations need K2 = 0".into()));
    }
    let h = tol::PROFILE_STEP;
    let unit = BasicSolutionParams::default();
    let rows = par::map_slice(thetas, |&t| -> Result<(f64, f64)> {
        // ψ(t + jh) − ψ(t) by local quadrature, j = −4..=4.
        let dpsi: Vec<f64> = (-4i32..=4)
            .map(|j| {
                let x = t + j as f64 * h;
                -p.k1 * quadrature::integrate(|s| exact::u_phi_basic(s, unit), t, x, 1e-18, 1e-15)
            })
            .collect();
        if dpsi.windows(2).any(|w| (w[1] - w[0]) * p.k1.signum() <= 0.0) {
            return Err(Error::NonMonotoneProfile(t));
        }
        let omega: Vec<f64> = (-4i32..=4)
            .map(|j| exact::omega_basic(t + j as f64 * h, p))
            .collect::<Result<_>>()?;
        let d1 = |v: &[f64], c: usize| (v[c - 2] - 8.0 * v[c - 1] + 8.0 * v[c + 1] - v[c + 2]) / (12.0 * h);
        let psi_t: Vec<f64> = (2..=6).map(|c| d1(&dpsi, c)).collect();
        let omega_t: Vec<f64> = (2..=6).map(|c| d1(&omega, c)).collect();
        let g1: Vec<f64> = omega_t.iter().zip(&psi_t).map(|(a, b)| a / b).collect();
        let g2 = d1(&g1, 2) / psi_t[2];
        let (g, g1c) = (omega[4], g1[2]);
        let grad_psi2 = exact::u_phi_basic(t, p).powi(2);
        let grad_omega2 = (p.k1 / t.sin()).powi(2);
        let a = (grad_psi2 - g * g1c / g2).abs() / grad_psi2;
        let b = (grad_omega2 - g * g1c.powi(3) / g2).abs() / grad_omega2;
        Ok((a, b))
    });
    let mut ra = Vec::with_capacity(thetas.len());
    let mut rb = Vec::with_capacity(thetas.len());
    for r in rows {
        let (a, b) = r?;
        ra.push(a);
        rb.push(b);
    }
    Ok((ra, rb))
}

/// The three G(ψ) checks: gradient identities along `n_theta` profile
/// samples in the band, and ∇̃²∇̃²ψ on the grid.
pub fn check_theorem2_relations(p: BasicSolutionParams, n_theta: usize, spec: GridSpec, band: Band) -> Result<Vec<CheckReport>> {
    let thetas = band_samples(band, n_theta);
    let (ra, rb) = theorem2_profile_residuals(p, &thetas)?;
    let max = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(*x));
    let domain = (band.lo, band.hi);
    let grid = build_grid(spec)?;
    let psi = exact::psi_field(&grid, p);
    let bih = laplace_beltrami_fd(&laplace_beltrami_fd(&psi));
    Ok(vec![
        CheckReport::new("theorem2_grad_psi", max(&ra), (n_theta, 1), domain, tol::THEOREM2_RELATIVE),
        CheckReport::new("theorem2_grad_omega", max(&rb), (n_theta, 1), domain, tol::THEOREM2_RELATIVE),
        CheckReport::on_grid("theorem2_biharmonic", &psi, band, bih.max_abs_in_band(band), tol::FD_RESIDUAL),
    ])
}

/// Zonal-consistency step: sin²θ as a function of ψ is single-valued per
/// hemisphere and two-to-one overall, and the φ-derivatives of the sampled
/// sin²θ and ψ fields vanish exactly. Each failed structural condition
/// contributes a residual of 1.
pub fn check_f_of_psi_equals_sin2(p: BasicSolutionParams, n_theta: usize, spec: GridSpec) -> Result<CheckReport> {
    if p.k1 == 0.0 {
        return Err(Error::InvalidParams("K1 must be nonzero".into()));
    }
    let thetas = band_samples(Band::FULL, n_theta);
    let psi = exact::psi_basic_profile(&thetas, p);
    let dir = p.k1.signum();
    let mut residual: f64 = 0.0;
    // 1-to-1 per hemisphere: ψ strictly monotone.
    if psi.windows(2).any(|w| (w[1] - w[0]) * dir <= 0.0) {
        residual = residual.max(1.0);
    }
    // 2-to-1 overall: mirrored samples share sin²θ but not ψ.
    for k in 0..n_theta / 2 {
        let m = n_theta - 1 - k;
        let same_sin2 = (thetas[k].sin().powi(2) - thetas[m].sin().powi(2)).abs() <= 1e-12;
        if !same_sin2 || psi[k] == psi[m] {
            residual = residual.max(1.0);
        }
    }
    let grid = build_grid(spec)?;
    let sin2 = ScalarField::zonal(&grid, |t| t.sin().powi(2));
    let psi_grid = exact::psi_field(&grid, p);
    residual = residual.max(d_phi(&sin2).max_abs()).max(d_phi(&psi_grid).max_abs());
    Ok(CheckReport::new("f_of_psi_equals_sin2", residual, (grid.nlat(), grid.nlon()), (0.0, PI), tol::EXACT))
}

/// Returns a warning when the band reaches close enough to a pole that the
/// vorticity singularity dominates the residuals.
pub fn near_pole_warning(band: Band) -> Option<String> {
    let margin = PI / 16.0;
    (band.lo < margin || band.hi > PI - margin).then(|| {
        format!(
            "band [{:.4}, {:.4}] approaches a pole; residuals there reflect the point-vortex singularity",
            band.lo, band.hi
        )
    })
}

/// Choice of Φ profile for the Φ-equation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiProfile {
    /// K₁² cosh²(ω/K₁), the profile realised by the basic solution.
    Cosh2,
    /// A e^{Bω}.
    Exponential { a: f64, b: f64 },
}

impl PhiProfile {
    pub fn eval(&self, omega: f64, k1: f64) -> f64 {
        match *self {
            PhiProfile::Cosh2 => k1 * k1 * (omega / k1).cosh().powi(2),
            PhiProfile::Exponential { a, b } => a * (b * omega).exp(),
        }
    }
}

/// Parameters of the full check suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub grid: GridSpec,
    pub params: BasicSolutionParams,
    pub nu: f64,
    pub band: Band,
    pub lmax: usize,
    pub n_theta: usize,
    pub phi: PhiProfile,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::gauss(256, 512),
            params: BasicSolutionParams::default(),
            nu: 0.01,
            band: Band::DEFAULT,
            lmax: 64,
            n_theta: 4096,
            phi: PhiProfile::Cosh2,
        }
    }
}

/// Runs every check on the basic solution and returns the reports in a
/// fixed order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let p = cfg.params;
    if p.k1 == 0.0 || p.k2 != 0.0 {
        return Err(Error::InvalidParams("check suite needs K1 != 0 and K2 = 0".into()));
    }
    let grid = build_grid(cfg.grid)?;
    let omega = exact::omega_field(&grid, p);
    let psi = exact::psi_field(&grid, p);
    let mut reports = vec![
        check_gauss_constraint(&omega, p.k2, tol::GAUSS_CONSTRAINT),
        check_vanishing_jacobian(&psi, &omega, cfg.band, tol::ZONAL_JACOBIAN)?,
        check_harmonic_vorticity(&omega, cfg.band, tol::FD_RESIDUAL),
        check_ns_residual(&psi, &omega, cfg.nu, cfg.band, tol::FD_RESIDUAL)?,
    ];
    let kernel = global_harmonic_nullspace(cfg.lmax);
    reports.push(CheckReport::new(
        "harmonic_nullspace",
        (kernel as f64 - 1.0).abs(),
        (cfg.lmax, 1),
        (0.0, cfg.lmax as f64),
        tol::EXACT,
    ));
    // ω range spanned on the band.
    let (w_lo, w_hi) = (p.k1 * (0.5 * cfg.band.lo).tan().ln(), p.k1 * (0.5 * cfg.band.hi).tan().ln());
    let omega_samples: Vec<f64> = (0..=200).map(|k| w_lo + (w_hi - w_lo) * k as f64 / 200.0).collect();
    let phi = cfg.phi;
    reports.push(check_gg_ode(|w| phi.eval(w, p.k1), &omega_samples, tol::GG_ODE)?);
    let chis: Vec<f64> = (0..=200).map(|k| -5.0 + 10.0 * k as f64 / 200.0).collect();
    reports.push(check_mercator_obstruction(&chis, tol::MERCATOR)?);
    reports.extend(check_theorem2_relations(p, cfg.n_theta, cfg.grid, cfg.band)?);
    reports.push(check_f_of_psi_equals_sin2(p, cfg.n_theta, cfg.grid)?);
    Ok(reports)
}
