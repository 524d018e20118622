use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid spec: {0}")]
    InvalidSpec(String),

    #[error("colatitude {0} outside the open interval (0, pi)")]
    Domain(f64),

    #[error("vorticity is singular at the pole (theta = {0})")]
    PoleSingularity(f64),

    #[error("grid {nlat}x{nlon} does not resolve degree {lmax}")]
    UnderResolvedGrid { nlat: usize, nlon: usize, lmax: usize },

    #[error("coefficients violate real-field conjugate symmetry (residue {0:e})")]
    SymmetryViolation(f64),

    #[error("mean vorticity {mean:e} violates the Gauss constraint (tolerance {tolerance:e})")]
    GaussConstraintViolated { mean: f64, tolerance: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("profile must be positive, got {value:e} at {at}")]
    NonpositivePhi { value: f64, at: f64 },

    #[error("profile is not monotone near theta = {0}; cannot invert")]
    NonMonotoneProfile(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("instability detected at t = {time}: max |omega| = {max_omega:e}")]
    InstabilityDetected { time: f64, max_omega: f64 },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
