//! The zonal point-vortex-pair solution
//! ω(θ) = K₁ ln tan(θ/2) + K₂ and its derived quantities.
//!
//! Velocity is obtained from ω through the conventions of
//! [`crate::operators`]: u_φ = −ψ′ with −∇̃²ψ = ω, which gives
//! u_φ(θ) = (K₁/sin θ) I(θ) with I(θ) = ∫₀^θ sin s ln tan(s/2) ds ≤ 0.

use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::par;
use crate::quadrature;
use crate::spharm::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasicSolutionParams {
    /// Vortex-pair strength.
    pub k1: f64,
    /// Constant vorticity offset.
    pub k2: f64,
}

impl BasicSolutionParams {
    pub fn new(k1: f64, k2: f64) -> Self {
        Self { k1, k2 }
    }

    /// Total vorticity 4πK₂ vanishes.
    pub fn is_gauss_admissible(&self) -> bool {
        self.k2 == 0.0
    }

    fn require_pair(&self) -> Result<()> {
        if self.k1 == 0.0 || self.k2 != 0.0 {
            return Err(Error::InvalidParams(format!(
                "need K1 != 0 and K2 = 0, got K1 = {}, K2 = {}",
                self.k1, self.k2
            )));
        }
        Ok(())
    }
}

impl Default for BasicSolutionParams {
    fn default() -> Self {
        Self { k1: 1.0, k2: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hemisphere {
    North,
    South,
}

/// ω(θ) = K₁ ln tan(θ/2) + K₂; singular at both poles.
pub fn omega_basic(theta: f64, p: BasicSolutionParams) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::PoleSingularity(theta));
    }
    Ok(p.k1 * (0.5 * theta).tan().ln() + p.k2)
}

/// I(θ) = ln sin θ − cos θ ln tan(θ/2) − ln 2, evaluated as
/// 2[s² ln s + c² ln c] with s = sin(θ/2), c = cos(θ/2). Both terms are
/// non-positive, so the sum has no cancellation near either pole.
pub fn velocity_integral(theta: f64) -> f64 {
    if theta <= 0.0 || theta >= PI {
        return 0.0;
    }
    let (s, c) = (0.5 * theta).sin_cos();
    let (s2, c2) = (s * s, c * c);
    let ln_s = if s2 < 0.5 { s.ln() } else { 0.5 * (-c2).ln_1p() };
    let ln_c = if c2 < 0.5 { c.ln() } else { 0.5 * (-s2).ln_1p() };
    2.0 * (s2 * ln_s + c2 * ln_c)
}

/// u_φ(θ) = K₁ I(θ)/sin θ; tends to 0 at both poles and is even about the equator.
pub fn u_phi_basic(theta: f64, p: BasicSolutionParams) -> f64 {
    if theta <= 0.0 || theta >= PI {
        return 0.0;
    }
    p.k1 * velocity_integral(theta) / theta.sin()
}

const PSI_TOL: f64 = 1e-15;

/// ψ(θ) = −∫₀^θ u_φ(s) ds (gauge ψ(0⁺) = 0), by adaptive quadrature.
pub fn psi_basic(theta: f64, p: BasicSolutionParams) -> f64 {
    if theta <= 0.0 {
        return 0.0;
    }
    let unit = BasicSolutionParams { k1: 1.0, k2: 0.0 };
    -p.k1 * quadrature::integrate(|s| u_phi_basic(s, unit), 0.0, theta.min(PI), PSI_TOL, PSI_TOL)
}

/// ψ at many colatitudes, integrating segment by segment between the sorted
/// nodes and accumulating. Much cheaper than repeated [`psi_basic`] calls.
pub fn psi_basic_profile(thetas: &[f64], p: BasicSolutionParams) -> Vec<f64> {
    let mut order: Vec<usize> = (0..thetas.len()).collect();
    order.sort_by(|&a, &b| thetas[a].total_cmp(&thetas[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| thetas[i].clamp(0.0, PI)).collect();
    let unit = BasicSolutionParams { k1: 1.0, k2: 0.0 };
    let pieces = par::map_range(sorted.len(), |k| {
        let lo = if k == 0 { 0.0 } else { sorted[k - 1] };
        quadrature::integrate(|s| u_phi_basic(s, unit), lo, sorted[k], PSI_TOL, PSI_TOL)
    });
    let mut out = vec![0.0; thetas.len()];
    let mut acc = 0.0;
    for (k, piece) in pieces.iter().enumerate() {
        acc += piece;
        out[order[k]] = -p.k1 * acc;
    }
    out
}

/// ∫∫ ω dA over one hemisphere (area element sin θ dθ dφ):
/// north 2π(K₂ − K₁ ln 2), south 2π(K₂ + K₁ ln 2).
pub fn hemisphere_vorticity_integral(p: BasicSolutionParams, hemisphere: Hemisphere) -> f64 {
    // ∫₀^{π/2} sin θ ln tan(θ/2) dθ = −ln 2
    let pair = match hemisphere {
        Hemisphere::North => -LN_2,
        Hemisphere::South => LN_2,
    };
    2.0 * PI * (p.k1 * pair + p.k2)
}

/// Φ(ω) = |∇ω|²/sin²θ along the solution, K₁² cosh²(ω/K₁).
pub fn phi_of_omega_basic(omega: f64, p: BasicSolutionParams) -> Result<f64> {
    p.require_pair()?;
    let c = (omega / p.k1).cosh();
    Ok(p.k1 * p.k1 * c * c)
}

/// Exact projection onto Y_l^0 up to degree `lmax`.
///
/// By Green's identity on the punctured sphere, l(l+1) a_l = 2π Y_l^0(π) −
/// 2π Y_l^0(0) times K₁, so only odd degrees survive:
/// a_{l,0} = −4πK₁ √((2l+1)/4π) / (l(l+1)); a_{0,0} = √(4π) K₂.
pub fn project_basic(p: BasicSolutionParams, lmax: usize) -> SpectralField {
    let mut c = SpectralField::zeros(lmax);
    c.set(0, 0, Complex64::new((4.0 * PI).sqrt() * p.k2, 0.0));
    for l in (1..=lmax).step_by(2) {
        let lf = l as f64;
        let a = -4.0 * PI * p.k1 * ((2.0 * lf + 1.0) / (4.0 * PI)).sqrt() / (lf * (lf + 1.0));
        c.set(l, 0, Complex64::new(a, 0.0));
    }
    c
}

/// ω sampled on a grid (nodes are pole-free).
pub fn omega_field(grid: &Arc<Grid>, p: BasicSolutionParams) -> ScalarField {
    ScalarField::zonal(grid, |t| p.k1 * (0.5 * t).tan().ln() + p.k2)
}

pub fn u_phi_field(grid: &Arc<Grid>, p: BasicSolutionParams) -> ScalarField {
    ScalarField::zonal(grid, |t| u_phi_basic(t, p))
}

pub fn psi_field(grid: &Arc<Grid>, p: BasicSolutionParams) -> ScalarField {
    let profile = psi_basic_profile(grid.thetas(), p);
    let mut out = ScalarField::zeros(grid);
    par::for_each_row(out.values_mut(), grid.nlon(), |i, row| row.fill(profile[i]));
    out
}
