//! Spherical-harmonic analysis and synthesis on quadrature grids, with the
//! spectral Laplace–Beltrami operator and its inverse.
//!
//! Harmonics are orthonormal over the unit sphere and carry the
//! Condon–Shortley phase: Y_l^m(θ, φ) = P̄_l^m(cos θ) e^{imφ} with
//! Y_l^{-m} = (-1)^m conj(Y_l^m).

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{sci, Grid, ScalarField};
use crate::par;

/// Tolerance on conjugate-symmetry residue when real output is requested.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;
/// Relative tolerance on a_{0,0} accepted by [`invert_poisson`].
pub const GAUSS_TOLERANCE: f64 = 1e-10;

/// Complex coefficients a_{l,m}, 0 ≤ l ≤ lmax, −l ≤ m ≤ l.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    lmax: usize,
    coeffs: Vec<Complex64>,
}


impl SpectralField {
    pub fn zeros(lmax: usize) -> Self {
        Self { lmax, coeffs: vec![Complex64::new(0.0, 0.0); (lmax + 1) * (lmax + 1)] }
    }

    /// Real field a·Y_l^m + conj partner, i.e. coefficient `amp` at (l, m)
    /// and (-1)^m conj(amp) at (l, -m).
    pub fn single_mode(lmax: usize, l: usize, m: i64, amp: Complex64) -> Result<Self> {
        if l > lmax || m.unsigned_abs() as usize > l {
            return Err(Error::InvalidParams(format!("mode ({l}, {m}) outside degree {lmax}")));
        }
        let mut c = Self::zeros(lmax);
        if m == 0 {
            c.set(l, 0, Complex64::new(amp.re, 0.0));
        } else {
            c.set(l, m, amp);
            c.set(l, -m, sign(m) * amp.conj());
        }
        Ok(c)
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    fn index(&self, l: usize, m: i64) -> usize {
        debug_assert!(l <= self.lmax && m.unsigned_abs() as usize <= l);
        (l * l + l).wrapping_add_signed(m as isize)
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.coeffs[self.index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, v: Complex64) {
        let i = self.index(l, m);
        self.coeffs[i] = v;
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Iterates `(l, m, a_lm)` in (l, m) order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, Complex64)> + '_ {
        (0..=self.lmax).flat_map(move |l| {
            (-(l as i64)..=l as i64).map(move |m| (l, m, self.get(l, m)))
        })
    }

    /// Euclidean norm of the coefficient vector (the L² norm of the field).
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest deviation from a_{l,-m} = (-1)^m conj(a_{l,m}).
    pub fn symmetry_residue(&self) -> f64 {
        let mut r: f64 = 0.0;
        for l in 0..=self.lmax {
            r = r.max(self.get(l, 0).im.abs());
            for m in 1..=l as i64 {
                r = r.max((self.get(l, -m) - sign(m) * self.get(l, m).conj()).norm());
            }
        }
        r
    }

    /// Copy truncated or zero-padded to `lmax`.
    pub fn resized(&self, lmax: usize) -> Self {
        let mut out = Self::zeros(lmax);
        for l in 0..=lmax.min(self.lmax) {
            for m in -(l as i64)..=l as i64 {
                out.set(l, m, self.get(l, m));
            }
        }
        out
    }

    /// Applies `f(l, m, a)` to every coefficient.
    pub fn map(&self, f: impl Fn(usize, i64, Complex64) -> Complex64) -> Self {
        let mut out = Self::zeros(self.lmax);
        for (l, m, a) in self.iter() {
            out.set(l, m, f(l, m, a));
        }
        out
    }

    /// Coefficientwise `self + s·other`; both must share `lmax`.
    pub fn axpy(&self, s: f64, other: &SpectralField) -> Self {
        assert_eq!(self.lmax, other.lmax, "axpy on mismatched truncations");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b * s).collect();
        Self { lmax: self.lmax, coeffs }
    }

    /// Writes `l,m,re,im` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["l", "m", "re", "im"])?;
        for (l, m, a) in self.iter() {
            out.write_record([l.to_string(), m.to_string(), sci(a.re), sci(a.im)])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads `l,m,re,im` rows; degree is the largest `l` present and absent
    /// entries are zero.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(r);
        let headers = reader.headers()?.clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["l", "m", "re", "im"] {
            return Err(Error::Parse(format!("expected header l,m,re,im, got {headers:?}")));
        }
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let field = |k: usize| rec.get(k).map(str::trim).unwrap_or("");
            let l: usize = field(0).parse().map_err(|e| Error::Parse(format!("l: {e}")))?;
            let m: i64 = field(1).parse().map_err(|e| Error::Parse(format!("m: {e}")))?;
            let re: f64 = field(2).parse().map_err(|e| Error::Parse(format!("re: {e}")))?;
            let im: f64 = field(3).parse().map_err(|e| Error::Parse(format!("im: {e}")))?;
            if m.unsigned_abs() as usize > l {
                return Err(Error::Parse(format!("|m| > l in row ({l}, {m})")));
            }
            rows.push((l, m, Complex64::new(re, im)));
        }
        let lmax = rows.iter().map(|r| r.0).max().unwrap_or(0);
        let mut out = Self::zeros(lmax);
        for (l, m, a) in rows {
            out.set(l, m, a);
        }
        Ok(out)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

fn sign(m: i64) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// How the longitude (m) transform is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LongitudeTransform {
    Fft,
    /// Direct O(nlon·lmax) Fourier sum; the reference definition.
    Direct,
}

/// Precomputed associated-Legendre tables for one grid and degree bound.
pub struct TransformPlan {
    grid: Arc<Grid>,
    lmax: usize,
    /// P̄_l^m(cos θ_i), laid out per latitude then by (m, l ≥ m).
    plm: Vec<f64>,
    /// dP̄_l^m/dθ at the same nodes.
    dplm: Vec<f64>,
    ntri: usize,
    longitude: LongitudeTransform,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// cos/sin(2πk/nlon), k = 0..nlon, for the direct sum.
    twiddle: Vec<(f64, f64)>,
}

impl std::fmt::Debug for TransformPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformPlan")
            .field("nlat", &self.grid.nlat())
            .field("nlon", &self.grid.nlon())
            .field("lmax", &self.lmax)
            .field("longitude", &self.longitude)
            .finish()
    }
}

fn tri_offset(lmax: usize, m: usize) -> usize {
    m * (lmax + 1) - m * (m.saturating_sub(1)) / 2
}

/// Orthonormal P̄_l^m(cos θ) and dP̄_l^m/dθ for 0 ≤ m ≤ l ≤ lmax at one
/// colatitude, using the standard stable three-term recurrence in l.
pub fn legendre_table(lmax: usize, theta: f64) -> (Vec<f64>, Vec<f64>) {
    let ntri = (lmax + 1) * (lmax + 2) / 2;
    let (x, s) = (theta.cos(), theta.sin());
    let mut p = vec![0.0; ntri];
    let mut dp = vec![0.0; ntri];
    let mut pmm = (0.25 / PI).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        let off = tri_offset(lmax, m);
        p[off] = pmm;
        if m < lmax {
            p[off + 1] = (2.0 * m as f64 + 3.0).sqrt() * x * pmm;
        }
        for l in (m + 2)..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let l1 = l - 1;
            let a_prev = ((4.0 * (l1 * l1) as f64 - 1.0) / ((l1 * l1) as f64 - mf * mf)).sqrt();
            p[off + l - m] = a * (x * p[off + l - m - 1] - p[off + l - m - 2] / a_prev);
        }
        for l in m..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let lower = if l > m {
                ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt() * p[off + l - m - 1]
            } else {
                0.0
            };
            dp[off + l - m] = (lf * x * p[off + l - m] - lower) / s;
        }
    }
    (p, dp)
}

impl TransformPlan {
    pub fn new(grid: &Arc<Grid>, lmax: usize) -> Self {
        Self::with_longitude(grid, lmax, LongitudeTransform::Fft)
    }

    pub fn with_longitude(grid: &Arc<Grid>, lmax: usize, longitude: LongitudeTransform) -> Self {
        let ntri = (lmax + 1) * (lmax + 2) / 2;
        let tables = par::map_slice(grid.thetas(), |&t| legendre_table(lmax, t));
        let mut plm = Vec::with_capacity(ntri * grid.nlat());
        let mut dplm = Vec::with_capacity(ntri * grid.nlat());
        for (p, dp) in tables {
            plm.extend(p);
            dplm.extend(dp);
        }
        let nlon = grid.nlon();
        let mut planner = FftPlanner::new();
        let twiddle = (0..nlon)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / nlon as f64;
                (a.cos(), a.sin())
            })
            .collect();
        Self {
            grid: Arc::clone(grid),
            lmax,
            plm,
            dplm,
            ntri,
            longitude,
            forward: planner.plan_fft_forward(nlon),
            inverse: planner.plan_fft_inverse(nlon),
            twiddle,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn longitude(&self) -> LongitudeTransform {
        self.longitude
    }

    fn p_row(&self, i: usize) -> &[f64] {
        &self.plm[i * self.ntri..(i + 1) * self.ntri]
    }

    fn dp_row(&self, i: usize) -> &[f64] {
        &self.dplm[i * self.ntri..(i + 1) * self.ntri]
    }

    /// (2π/nlon) Σ_j f_j e^{-imφ_j} for m = 0..=lmax.
    fn row_forward(&self, row: &[f64]) -> Vec<Complex64> {
        let n = row.len();
        let scale = 2.0 * PI / n as f64;
        match self.longitude {
            LongitudeTransform::Fft => {
                let mut buf: Vec<Complex64> = row.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                self.forward.process(&mut buf);
                (0..=self.lmax).map(|m| buf[m % n] * scale).collect()
            }
            LongitudeTransform::Direct => (0..=self.lmax)
                .map(|m| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, &v) in row.iter().enumerate() {
                        let (c, s) = self.twiddle[(m * j) % n];
                        acc += Complex64::new(v * c, -v * s);
                    }
                    acc * scale
                })
                .collect(),
        }
    }

    /// Re Σ_m c_m e^{imφ_j}, written into `row`.
    fn row_inverse(&self, spectrum: &[Complex64], row: &mut [f64]) {
        let n = row.len();
        match self.longitude {
            LongitudeTransform::Fft => {
                let mut buf = vec![Complex64::new(0.0, 0.0); n];
                for (m, c) in spectrum.iter().enumerate() {
                    buf[m % n] += c;
                }
                self.inverse.process(&mut buf);
                for (x, b) in row.iter_mut().zip(&buf) {
                    *x = b.re;
                }
            }
            LongitudeTransform::Direct => {
                for (j, x) in row.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (m, c) in spectrum.iter().enumerate() {
                        let (cs, sn) = self.twiddle[(m * j) % n];
                        acc += c.re * cs - c.im * sn;
                    }
                    *x = acc;
                }
            }
        }
    }

    /// Per-latitude Fourier spectra of the (real-part) synthesis sums using
    /// `table` (values or θ-derivatives), with coefficients folded for a real
    /// field.
    fn synthesize_rows(&self, c: &SpectralField, derivative: Derivative) -> Result<ScalarField> {
        if c.lmax() > self.lmax {
            return Err(Error::InvalidParams(format!(
                "field degree {} exceeds plan degree {}",
                c.lmax(),
                self.lmax
            )));
        }
        let scale = 1.0f64.max(c.max_abs());
        let residue = c.symmetry_residue();
        if residue > SYMMETRY_TOLERANCE * scale {
            return Err(Error::SymmetryViolation(residue));
        }
        let lmax = c.lmax();
        // b_{l,0} = Re a_{l,0}; b_{l,m} = a_{l,m} + (-1)^m conj(a_{l,-m}).
        let folded: Vec<Vec<Complex64>> = (0..=lmax)
            .map(|m| {
                (m..=lmax)
                    .map(|l| {
                        if m == 0 {
                            Complex64::new(c.get(l, 0).re, 0.0)
                        } else {
                            let mi = m as i64;
                            c.get(l, mi) + sign(mi) * c.get(l, -mi).conj()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut out = ScalarField::zeros(&self.grid);
        par::for_each_row(out.values_mut(), self.grid.nlon(), |i, row| {
            let table = match derivative {
                Derivative::Theta => self.dp_row(i),
                _ => self.p_row(i),
            };
            let spectrum: Vec<Complex64> = folded
                .iter()
                .enumerate()
                .map(|(m, col)| {
                    let off = tri_offset(self.lmax, m);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, b) in col.iter().enumerate() {
                        acc += b * table[off + k];
                    }
                    if derivative == Derivative::Phi {
                        acc * Complex64::new(0.0, m as f64)
                    } else {
                        acc
                    }
                })
                .collect();
            self.row_inverse(&spectrum, row);
        });
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Derivative {
    None,
    Theta,
    Phi,
}

/// Quadrature projection a_{l,m} = Σ w_i Δφ f(θ_i, φ_j) conj(Y_l^m).
pub fn analyze(f: &ScalarField, plan: &TransformPlan) -> Result<SpectralField> {
    let grid = plan.grid();
    f.same_grid(&ScalarField::zeros(grid))?;
    if plan.lmax > grid.max_resolved_degree() {
        return Err(Error::UnderResolvedGrid { nlat: grid.nlat(), nlon: grid.nlon(), lmax: plan.lmax });
    }
    let lmax = plan.lmax;
    let spectra = par::map_range(grid.nlat(), |i| plan.row_forward(f.row(i)));
    let columns = par::map_range(lmax + 1, |m| {
        let off = tri_offset(lmax, m);
        (m..=lmax)
            .map(|l| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, w) in grid.weights().iter().enumerate() {
                    acc += spectra[i][m] * (w * plan.p_row(i)[off + l - m]);
                }
                acc
            })
            .collect::<Vec<_>>()
    });
    let mut out = SpectralField::zeros(lmax);
    for (m, col) in columns.into_iter().enumerate() {
        let mi = m as i64;
        for (k, a) in col.into_iter().enumerate() {
            let l = m + k;
            if m == 0 {
                out.set(l, 0, Complex64::new(a.re, 0.0));
            } else {
                out.set(l, mi, a);
                out.set(l, -mi, sign(mi) * a.conj());
            }
        }
    }
    Ok(out)
}

/// Pointwise real sum Σ a_{l,m} Y_l^m on the plan's grid.
pub fn synthesize(c: &SpectralField, plan: &TransformPlan) -> Result<ScalarField> {
    plan.synthesize_rows(c, Derivative::None)
}

/// Spectral (∂f/∂θ, ∂f/∂φ) of a real band-limited field.
pub fn synthesize_gradient(c: &SpectralField, plan: &TransformPlan) -> Result<(ScalarField, ScalarField)> {
    Ok((plan.synthesize_rows(c, Derivative::Theta)?, plan.synthesize_rows(c, Derivative::Phi)?))
}

/// a_{l,m} ↦ −l(l+1) a_{l,m}.
pub fn laplace_beltrami_spectral(c: &SpectralField) -> SpectralField {
    c.map(|l, _, a| a * -((l * (l + 1)) as f64))
}

/// Solves −∇̃²ψ = ω in coefficients with the zero-mean gauge a_{0,0}(ψ) = 0.
pub fn invert_poisson(omega: &SpectralField) -> Result<SpectralField> {
    let mean = omega.get(0, 0).norm();
    let tolerance = GAUSS_TOLERANCE * omega.norm();
    if mean > tolerance {
        return Err(Error::GaussConstraintViolated { mean, tolerance });
    }
    Ok(omega.map(|l, _, a| if l == 0 { Complex64::new(0.0, 0.0) } else { a / ((l * (l + 1)) as f64) }))
}

/// Y_l^m(θ, φ) evaluated directly from a single-column recurrence.
pub fn ylm(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    let (p, _) = legendre_table(l, theta);
    let v = p[tri_offset(l, am) + l - am];
    let y = Complex64::from_polar(v, am as f64 * phi);
    if m < 0 {
        sign(m) * y.conj()
    } else {
        y
    }
}
