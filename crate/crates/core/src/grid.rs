//! Colatitude–longitude quadrature grids on the unit sphere and the scalar
//! fields sampled on them.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::par;
use crate::quadrature;

/// Placement rule for the colatitude nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Gauss–Legendre nodes in μ = cos θ.
    GaussLegendre,
    /// Midpoints θ_i = (i + ½)π/nlat with Fejér weights.
    UniformInterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub nlat: usize,
    pub nlon: usize,
    pub kind: GridKind,
}

impl GridSpec {
    pub const MIN_NODES: usize = 4;

    pub fn gauss(nlat: usize, nlon: usize) -> Self {
        Self { nlat, nlon, kind: GridKind::GaussLegendre }
    }

    pub fn uniform(nlat: usize, nlon: usize) -> Self {
        Self { nlat, nlon, kind: GridKind::UniformInterior }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nlat < Self::MIN_NODES || self.nlon < Self::MIN_NODES {
            return Err(Error::InvalidSpec(format!(
                "need nlat >= {m} and nlon >= {m}, got {}x{}",
                self.nlat,
                self.nlon,
                m = Self::MIN_NODES
            )));
        }
        Ok(())
    }
}

/// A pole-free tensor grid. Weights integrate against sin θ dθ.
#[derive(Debug, Clone)]
pub struct Grid {
    kind: GridKind,
    thetas: Vec<f64>,
    phis: Vec<f64>,
    weights: Vec<f64>,
    sin_thetas: Vec<f64>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.thetas == other.thetas && self.phis.len() == other.phis.len()
    }
}

/// Builds the grid described by `spec`.
pub fn build_grid(spec: GridSpec) -> Result<Arc<Grid>> {
    spec.validate()?;
    let (thetas, weights) = match spec.kind {
        GridKind::GaussLegendre => {
            let (mu, w) = quadrature::gauss_legendre(spec.nlat);
            (mu.iter().map(|m| m.acos()).collect(), w)
        }
        GridKind::UniformInterior => quadrature::fejer_first(spec.nlat),
    };
    let phis = (0..spec.nlon)
        .map(|j| 2.0 * PI * j as f64 / spec.nlon as f64)
        .collect();
    let sin_thetas = thetas.iter().map(|t: &f64| t.sin()).collect();
    Ok(Arc::new(Grid { kind: spec.kind, thetas, phis, weights, sin_thetas }))
}

impl Grid {
    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn nlat(&self) -> usize {
        self.thetas.len()
    }

    pub fn nlon(&self) -> usize {
        self.phis.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sin_thetas(&self) -> &[f64] {
        &self.sin_thetas
    }

    pub fn dphi(&self) -> f64 {
        2.0 * PI / self.nlon() as f64
    }

    /// Highest spherical-harmonic degree this grid analyzes exactly.
    pub fn max_resolved_degree(&self) -> usize {
        let by_lat = match self.kind {
            GridKind::GaussLegendre => self.nlat() - 1,
            GridKind::UniformInterior => (self.nlat() - 1) / 2,
        };
        by_lat.min((self.nlon() - 1) / 2)
    }

    /// Indices of the latitude rows with θ inside `band` (inclusive).
    pub fn band_rows(&self, band: Band) -> std::ops::Range<usize> {
        let start = self.thetas.partition_point(|&t| t < band.lo);
        let end = self.thetas.partition_point(|&t| t <= band.hi);
        start..end.max(start)
    }
}

/// Closed colatitude interval used to exclude the poles from diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    /// θ ∈ [π/8, 7π/8].
    pub const DEFAULT: Band = Band { lo: PI / 8.0, hi: 7.0 * PI / 8.0 };
    pub const FULL: Band = Band { lo: 0.0, hi: PI };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&lo) || !(0.0..=PI).contains(&hi) || lo >= hi {
            return Err(Error::InvalidConfig(format!("band [{lo}, {hi}] is not a sub-interval of [0, pi]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta >= self.lo && theta <= self.hi
    }
}

impl Default for Band {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Real samples on a grid, stored θ-major (`nlat` rows of `nlon`).
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self { grid: Arc::clone(grid), values: vec![0.0; grid.nlat() * grid.nlon()] }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nlat() * grid.nlon() {
            return Err(Error::InvalidSpec(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.nlat(),
                grid.nlon()
            )));
        }
        Ok(Self { grid: Arc::clone(grid), values })
    }

    /// Samples `f(θ, φ)` at every node.
    pub fn from_fn<F>(grid: &Arc<Grid>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync,
    {
        let mut out = Self::zeros(grid);
        let (thetas, phis) = (grid.thetas(), grid.phis());
        par::for_each_row(&mut out.values, grid.nlon(), |i, row| {
            for (x, &phi) in row.iter_mut().zip(phis) {
                *x = f(thetas[i], phi);
            }
        });
        out
    }

    /// Samples a longitude-independent profile `f(θ)`.
    pub fn zonal<F>(grid: &Arc<Grid>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync,
    {
        let profile = par::map_slice(grid.thetas(), |&t| f(t));
        let mut out = Self::zeros(grid);
        par::for_each_row(&mut out.values, grid.nlon(), |i, row| row.fill(profile[i]));
        out
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.nlon() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.nlon();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn same_grid(&self, other: &ScalarField) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self { grid: Arc::clone(&self.grid), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise `self - other`.
    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: Arc::clone(&self.grid), values })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest |value| over rows whose colatitude lies in `band`.
    pub fn max_abs_in_band(&self, band: Band) -> f64 {
        self.grid
            .band_rows(band)
            .flat_map(|i| self.row(i).iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Writes `theta,phi,value` rows in θ-major order with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["theta", "phi", "value"])?;
        for (i, &theta) in self.grid.thetas().iter().enumerate() {
            for (j, &phi) in self.grid.phis().iter().enumerate() {
                out.write_record([sci(theta), sci(phi), sci(self.get(i, j))])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// 17-significant-digit scientific formatting shared by every CSV writer.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Σ_{i,j} w_i (2π/nlon) f(θ_i, φ_j) ≈ ∫∫ f dA.
pub fn surface_integral(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let dphi = grid.dphi();
    grid.weights()
        .iter()
        .enumerate()
        .map(|(i, w)| w * dphi * f.row(i).iter().sum::<f64>())
        .sum()
}

/// Mercator variable χ = ln tan(θ/2).
pub fn mercator_of_colatitude(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Domain(theta));
    }
    Ok((0.5 * theta).tan().ln())
}

/// Inverse of [`mercator_of_colatitude`]: θ = 2 atan(e^χ).
pub fn colatitude_of_mercator(chi: f64) -> f64 {
    2.0 * chi.exp().atan()
}
