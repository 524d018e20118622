//! Pointwise differential operators on latitude–longitude grids.
//!
//! Sign conventions (unit sphere): u_θ = (1/sin θ) ∂ψ/∂φ, u_φ = −∂ψ/∂θ and
//! ω = −∇̃²ψ. Latitude derivatives are second-order centered differences on
//! the (possibly non-uniform) colatitude nodes; the first and last rows use
//! shifted one-sided stencils, never pole values. Longitude derivatives are
//! periodic centered differences.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::par;
use crate::spharm::{analyze, synthesize_gradient, TransformPlan};
use crate::stencil::fd_weights;

/// Tangential velocity on a grid.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub u_theta: ScalarField,
    pub u_phi: ScalarField,
}

impl VelocityField {
    pub fn grid(&self) -> &Arc<Grid> {
        self.u_theta.grid()
    }
}

/// How first derivatives are taken.
#[derive(Debug, Clone, Copy)]
pub enum DerivativeScheme<'a> {
    FiniteDifference,
    /// Analyze on the plan's grid and differentiate the harmonics exactly.
    Spectral(&'a TransformPlan),
}

/// Rows and weights of a latitude stencil for one output row.
struct RowStencil {
    rows: Vec<usize>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

fn row_stencil(thetas: &[f64], i: usize, width: usize) -> RowStencil {
    let n = thetas.len();
    let start = if i == 0 {
        0
    } else if i == n - 1 {
        n - width
    } else {
        i - 1
    };
    let rows: Vec<usize> = (start..start + if i == 0 || i == n - 1 { width } else { 3 }).collect();
    let nodes: Vec<f64> = rows.iter().map(|&r| thetas[r]).collect();
    let w = fd_weights(thetas[i], &nodes, 2);
    RowStencil { rows, d1: w[1].clone(), d2: w[2].clone() }
}

fn combine(f: &ScalarField, rows: &[usize], weights: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for (&r, &w) in rows.iter().zip(weights) {
        for (o, v) in out.iter_mut().zip(f.row(r)) {
            *o += w * v;
        }
    }
}

/// ∂f/∂θ by second-order differences.
pub fn d_theta(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let mut out = ScalarField::zeros(grid);
    par::for_each_row(out.values_mut(), grid.nlon(), |i, row| {
        let s = row_stencil(grid.thetas(), i, 3);
        combine(f, &s.rows, &s.d1, row);
    });
    out
}

/// ∂f/∂φ by periodic centered differences.
pub fn d_phi(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let n = grid.nlon();
    let inv = 1.0 / (2.0 * grid.dphi());
    let mut out = ScalarField::zeros(grid);
    par::for_each_row(out.values_mut(), n, |i, row| {
        let src = f.row(i);
        for (j, x) in row.iter_mut().enumerate() {
            *x = (src[(j + 1) % n] - src[(j + n - 1) % n]) * inv;
        }
    });
    out
}

fn d_phi_phi_row(src: &[f64], dphi: f64, j: usize) -> f64 {
    let n = src.len();
    (src[(j + 1) % n] - 2.0 * src[j] + src[(j + n - 1) % n]) / (dphi * dphi)
}

/// (∂f/∂θ, ∂f/∂φ) under the chosen scheme.
pub fn gradient(f: &ScalarField, scheme: DerivativeScheme<'_>) -> Result<(ScalarField, ScalarField)> {
    match scheme {
        DerivativeScheme::FiniteDifference => Ok((d_theta(f), d_phi(f))),
        DerivativeScheme::Spectral(plan) => {
            f.same_grid(&ScalarField::zeros(plan.grid()))?;
            synthesize_gradient(&analyze(f, plan)?, plan)
        }
    }
}

/// u = ∇ψ × e_r with finite differences.
pub fn velocity_from_streamfunction(psi: &ScalarField) -> VelocityField {
    velocity_from_streamfunction_with(psi, DerivativeScheme::FiniteDifference)
        .expect("finite differences cannot fail")
}

pub fn velocity_from_streamfunction_with(psi: &ScalarField, scheme: DerivativeScheme<'_>) -> Result<VelocityField> {
    let (psi_t, psi_p) = gradient(psi, scheme)?;
    let sin = psi.grid().sin_thetas().to_vec();
    let nlon = psi.grid().nlon();
    let mut u_theta = psi_p;
    par::for_each_row(u_theta.values_mut(), nlon, |i, row| row.iter_mut().for_each(|x| *x /= sin[i]));
    Ok(VelocityField { u_theta, u_phi: psi_t.map(|v| -v) })
}

/// Radial curl ω = (1/sin θ)[∂θ(sin θ u_φ) − ∂φ u_θ].
pub fn vorticity_from_velocity(u: &VelocityField) -> Result<ScalarField> {
    u.u_theta.same_grid(&u.u_phi)?;
    let grid = u.grid();
    let sin = grid.sin_thetas();
    let mut flux = u.u_phi.clone();
    let nlon = grid.nlon();
    par::for_each_row(flux.values_mut(), nlon, |i, row| row.iter_mut().for_each(|x| *x *= sin[i]));
    let a = d_theta(&flux);
    let b = d_phi(&u.u_theta);
    let mut out = ScalarField::zeros(grid);
    par::for_each_row(out.values_mut(), nlon, |i, row| {
        for ((x, p), q) in row.iter_mut().zip(a.row(i)).zip(b.row(i)) {
            *x = (p - q) / sin[i];
        }
    });
    Ok(out)
}

/// Second-order Laplace–Beltrami operator.
///
/// Interior rows use the conservative form with face fluxes
/// (f_{i+1} − f_i)/(χ_{i+1} − χ_i), χ = ln tan(θ/2), and exact cell areas
/// cos θ_{i−½} − cos θ_{i+½} at the latitude midpoints. Since sin θ ∂θ = ∂χ,
/// this is a centered discretization of (1/sin θ)∂θ(sin θ ∂θ f) that is exact
/// for functions linear in χ. The first and last rows use four-point
/// one-sided stencils for f'' + cot θ f'.
pub fn laplace_beltrami_fd(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let thetas = grid.thetas();
    let n = thetas.len();
    let chis: Vec<f64> = thetas.iter().map(|t| (0.5 * t).tan().ln()).collect();
    let mids: Vec<f64> = thetas.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    let sin = grid.sin_thetas();
    let dphi = grid.dphi();
    let mut out = ScalarField::zeros(grid);
    par::for_each_row(out.values_mut(), grid.nlon(), |i, row| {
        let here = f.row(i);
        let azimuthal = 1.0 / (sin[i] * sin[i]);
        if i == 0 || i == n - 1 {
            let s = row_stencil(thetas, i, 4);
            let cot = thetas[i].cos() / sin[i];
            let w: Vec<f64> = s.d2.iter().zip(&s.d1).map(|(a, b)| a + cot * b).collect();
            combine(f, &s.rows, &w, row);
        } else {
            let up = f.row(i + 1);
            let down = f.row(i - 1);
            let (dc_up, dc_down) = (chis[i + 1] - chis[i], chis[i] - chis[i - 1]);
            let area = mids[i - 1].cos() - mids[i].cos();
            for j in 0..row.len() {
                let flux_up = (up[j] - here[j]) / dc_up;
                let flux_down = (here[j] - down[j]) / dc_down;
                row[j] = (flux_up - flux_down) / area;
            }
        }
        for (j, x) in row.iter_mut().enumerate() {
            *x += azimuthal * d_phi_phi_row(here, dphi, j);
        }
    });
    out
}

/// J(ψ, ω) = ψ_φ ω_θ − ψ_θ ω_φ (no metric prefactor).
pub fn jacobian(psi: &ScalarField, omega: &ScalarField) -> Result<ScalarField> {
    jacobian_with(psi, omega, DerivativeScheme::FiniteDifference)
}

pub fn jacobian_with(psi: &ScalarField, omega: &ScalarField, scheme: DerivativeScheme<'_>) -> Result<ScalarField> {
    psi.same_grid(omega)?;
    let (pt, pp) = gradient(psi, scheme)?;
    let (ot, op) = gradient(omega, scheme)?;
    let values = pp
        .values()
        .iter()
        .zip(ot.values())
        .zip(pt.values().iter().zip(op.values()))
        .map(|((a, b), (c, d))| a * b - c * d)
        .collect();
    ScalarField::from_values(psi.grid(), values)
}

/// Residual of the stationary vorticity equation,
/// (1/sin θ) J(ψ, ω) − ν ∇̃²ω. ν = 0 gives the Euler residual.
pub fn ns_residual(psi: &ScalarField, omega: &ScalarField, nu: f64) -> Result<ScalarField> {
    if !(nu >= 0.0) {
        return Err(Error::InvalidParams(format!("viscosity must be non-negative, got {nu}")));
    }
    let j = jacobian(psi, omega)?;
    let lap = laplace_beltrami_fd(omega);
    let grid = psi.grid();
    let sin = grid.sin_thetas();
    let mut out = ScalarField::zeros(grid);
    par::for_each_row(out.values_mut(), grid.nlon(), |i, row| {
        for ((x, a), b) in row.iter_mut().zip(j.row(i)).zip(lap.row(i)) {
            *x = a / sin[i] - nu * b;
        }
    });
    Ok(out)
}

/// Samples on a uniform (χ, φ) rectangle, periodic in φ, stored χ-major.
#[derive(Debug, Clone)]
pub struct MercatorPatch {
    chis: Vec<f64>,
    nlon: usize,
    values: Vec<f64>,
}

impl MercatorPatch {
    /// `nchi` rows from `chi0` with spacing `h`, `nlon` longitudes over 2π.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(chi0: f64, h: f64, nchi: usize, nlon: usize, f: F) -> Result<Self> {
        if nchi < 4 || nlon < 4 || !(h > 0.0) {
            return Err(Error::InvalidSpec(format!("mercator patch needs >= 4x4 nodes and h > 0 (got {nchi}x{nlon}, h={h})")));
        }
        let chis: Vec<f64> = (0..nchi).map(|k| chi0 + k as f64 * h).collect();
        let dphi = 2.0 * std::f64::consts::PI / nlon as f64;
        let values = chis
            .iter()
            .flat_map(|&c| (0..nlon).map(move |j| (c, j as f64 * dphi)))
            .map(|(c, p)| f(c, p))
            .collect();
        Ok(Self { chis, nlon, values })
    }

    pub fn chis(&self) -> &[f64] {
        &self.chis
    }

    pub fn nlon(&self) -> usize {
        self.nlon
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.values[k * self.nlon + j]
    }

    fn h(&self) -> f64 {
        self.chis[1] - self.chis[0]
    }
}

/// Five-point Laplacian ∂²/∂χ² + ∂²/∂φ²; end rows use the four-point
/// one-sided second derivative in χ.
pub fn mercator_laplacian(f: &MercatorPatch) -> MercatorPatch {
    let (n, nlon) = (f.chis.len(), f.nlon);
    let h2 = f.h() * f.h();
    let dphi = 2.0 * std::f64::consts::PI / nlon as f64;
    let mut values = vec![0.0; n * nlon];
    par::for_each_row(&mut values, nlon, |k, row| {
        let r = |kk: usize| &f.values[kk * nlon..(kk + 1) * nlon];
        let here = r(k);
        for (j, x) in row.iter_mut().enumerate() {
            let chi_chi = if k == 0 {
                (2.0 * r(0)[j] - 5.0 * r(1)[j] + 4.0 * r(2)[j] - r(3)[j]) / h2
            } else if k == n - 1 {
                (2.0 * r(n - 1)[j] - 5.0 * r(n - 2)[j] + 4.0 * r(n - 3)[j] - r(n - 4)[j]) / h2
            } else {
                (r(k + 1)[j] - 2.0 * here[j] + r(k - 1)[j]) / h2
            };
            *x = chi_chi + d_phi_phi_row(here, dphi, j);
        }
    });
    MercatorPatch { chis: f.chis.clone(), nlon, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, Band, GridSpec};

    fn grid(n: usize) -> Arc<Grid> {
        build_grid(GridSpec::gauss(n, 2 * n)).unwrap()
    }

    #[test]
    fn solid_body_rotation() {
        let g = grid(32);
        let psi = ScalarField::zonal(&g, f64::cos);
        let u = velocity_from_streamfunction(&psi);
        assert_eq!(u.u_theta.max_abs(), 0.0);
        let expect = ScalarField::zonal(&g, f64::sin);
        assert!(u.u_phi.sub(&expect).unwrap().max_abs_in_band(Band::FULL) < 5e-3);
        let omega = vorticity_from_velocity(&u).unwrap();
        let two_cos = ScalarField::zonal(&g, |t| 2.0 * t.cos());
        let err = omega.sub(&two_cos).unwrap().max_abs_in_band(Band::DEFAULT);
        assert!(err < 2e-2, "{err}");
    }

    #[test]
    fn constants_have_no_velocity_or_laplacian() {
        let g = grid(16);
        let c = ScalarField::zonal(&g, |_| 3.5);
        let u = velocity_from_streamfunction(&c);
        assert_eq!(u.u_theta.max_abs(), 0.0);
        assert!(u.u_phi.max_abs() < 1e-12);
        assert!(laplace_beltrami_fd(&c).max_abs() < 1e-9);
        let zero = VelocityField { u_theta: ScalarField::zeros(&g), u_phi: ScalarField::zeros(&g) };
        assert_eq!(vorticity_from_velocity(&zero).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn jacobian_zonal_and_self_vanish_exactly() {
        let g = grid(24);
        let a = ScalarField::zonal(&g, |t| t.cos().powi(3));
        let b = ScalarField::zonal(&g, |t| (0.5 * t).tan().ln());
        assert_eq!(jacobian(&a, &b).unwrap().max_abs(), 0.0);
        let f = ScalarField::from_fn(&g, |t, p| t.sin() * p.cos() + t.cos());
        assert_eq!(jacobian(&f, &f).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn jacobian_grid_mismatch() {
        let a = ScalarField::zeros(&grid(8));
        let b = ScalarField::zeros(&grid(10));
        assert!(matches!(jacobian(&a, &b), Err(Error::GridMismatch)));
        assert!(matches!(ns_residual(&a, &b, 0.1), Err(Error::GridMismatch)));
    }

    #[test]
    fn negative_viscosity_rejected() {
        let a = ScalarField::zeros(&grid(8));
        assert!(ns_residual(&a, &a, -1.0).is_err());
    }

    #[test]
    fn mercator_laplacian_of_linear_is_zero() {
        let p = MercatorPatch::from_fn(-1.0, 0.1, 8, 8, |c, _| 3.0 * c - 1.0).unwrap();
        let l = mercator_laplacian(&p);
        assert!(l.values().iter().all(|v| v.abs() < 1e-11));
    }
}
