//! Pass/fail thresholds used by the verification checks.

/// Finite-difference residuals of the exact solution on the default band
/// at the default resolution (nlat = 256).
pub const FD_RESIDUAL: f64 = 1e-4;

/// Jacobian of a zonal pair; exact zero on the grid, so only rounding.
pub const ZONAL_JACOBIAN: f64 = 1e-12;

/// Total vorticity against 4πK₂ on Gauss grids with nlat ≥ 64.
pub const GAUSS_CONSTRAINT: f64 = 1e-8;

/// Residual of (Φ′/Φ)′Φ = 2 with nested fourth-order differences.
pub const GG_ODE: f64 = 1e-8;

/// Step for differentiating Φ. Nested stencils lose ~ε/h² to rounding and
/// the residual is scaled by Φ, so a sixth-order stencil at 2⁻⁷ is used.
pub const GG_STEP: f64 = 1.0 / 128.0;

/// Δ_{χφ} ln sech χ + sech²χ at χ-step [`MERCATOR_STEP`].
pub const MERCATOR: f64 = 1e-6;
pub const MERCATOR_STEP: f64 = 1e-3;

/// Minimum |Δ_{χφ} ln sech χ| the sample set must exhibit.
pub const MERCATOR_OBSTRUCTION_FLOOR: f64 = 0.5;

/// Relative residual of the G(ψ) identities along the profile.
pub const THEOREM2_RELATIVE: f64 = 1e-4;

/// θ-step for differentiating the ψ and ω profiles.
pub const PROFILE_STEP: f64 = 1e-4;

/// Exact structural identities (φ-derivatives of zonal samples).
pub const EXACT: f64 = 0.0;
