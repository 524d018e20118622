#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Vorticity-equation toolkit on the unit sphere: grids, spherical-harmonic
//! transforms, finite-difference operators, the zonal point-vortex-pair
//! solution, verification checks and a spectral time integrator.

pub mod cli;
pub mod error;
pub mod exact;
pub mod grid;
pub mod operators;
pub mod par;
pub mod quadrature;
pub mod spharm;
pub mod stencil;
pub mod timestep;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
