//! RK4 integration of ∂ω/∂t = −(1/sin θ) J(ψ, ω) + ν∇̃²ω in spectral space,
//! with the Jacobian evaluated on a Gauss grid.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{project_basic, BasicSolutionParams};
use crate::grid::{build_grid, sci, Band, Grid, GridSpec, ScalarField};
use crate::par;
use crate::spharm::{analyze, invert_poisson, synthesize, synthesize_gradient, SpectralField, TransformPlan};

/// Bound on dt·ν·lmax(lmax+1); RK4 is stable on the negative real axis up
/// to about 2.785.
pub const STABILITY_LIMIT: f64 = 2.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub nu: f64,
    pub dt: f64,
    pub steps: usize,
    pub lmax: usize,
    /// Evaluate the Jacobian on a 3/2-padded grid so the quadratic product
    /// is alias-free up to lmax.
    pub dealias: bool,
    /// Colatitude band on which the drift diagnostic is measured.
    pub band: Band,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self { nu: 0.01, dt: 1e-3, steps: 1000, lmax: 31, dealias: true, band: Band::DEFAULT }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.nu >= 0.0) || !self.nu.is_finite() {
            return bad(format!("viscosity must be finite and >= 0, got {}", self.nu));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if self.steps == 0 {
            return bad("steps must be >= 1".into());
        }
        if self.lmax < 2 {
            return bad(format!("lmax must be >= 2, got {}", self.lmax));
        }
        let l = self.lmax as f64;
        let stiff = self.dt * self.nu * l * (l + 1.0);
        if stiff >= STABILITY_LIMIT {
            return bad(format!("dt*nu*lmax(lmax+1) = {stiff} exceeds {STABILITY_LIMIT}"));
        }
        Ok(())
    }

    /// Gauss grid on which products are formed.
    pub fn transform_grid(&self) -> GridSpec {
        let l = self.lmax;
        let (nlat, nlon) = if self.dealias { ((3 * l + 2) / 2, 3 * l + 1) } else { (l + 1, 2 * l + 1) };
        GridSpec::gauss(nlat.max(4), nlon.max(4))
    }
}

/// Precomputed transforms for one configuration.
#[derive(Debug)]
pub struct Integrator {
    cfg: EvolutionConfig,
    plan: TransformPlan,
    inv_sin: Vec<f64>,
}

impl Integrator {
    pub fn new(cfg: EvolutionConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = build_grid(cfg.transform_grid())?;
        let plan = TransformPlan::new(&grid, cfg.lmax);
        let inv_sin = grid.sin_thetas().iter().map(|s| 1.0 / s).collect();
        Ok(Self { cfg, plan, inv_sin })
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.plan.grid()
    }

    /// Spectral tendency. The l = 0 component is identically zero.
    pub fn rhs(&self, omega: &SpectralField) -> Result<SpectralField> {
        let omega = self.fit(omega)?;
        let psi = invert_poisson(&omega)?;
        let (psi_t, psi_p) = synthesize_gradient(&psi, &self.plan)?;
        let (om_t, om_p) = synthesize_gradient(&omega, &self.plan)?;
        let grid = self.plan.grid();
        let mut adv = ScalarField::zeros(grid);
        let nlon = grid.nlon();
        par::for_each_row(adv.values_mut(), nlon, |i, row| {
            let (a, b, c, d) = (psi_p.row(i), om_t.row(i), psi_t.row(i), om_p.row(i));
            for (j, x) in row.iter_mut().enumerate() {
                *x = -(a[j] * b[j] - c[j] * d[j]) * self.inv_sin[i];
            }
        });
        let adv = analyze(&adv, &self.plan)?;
        let nu = self.cfg.nu;
        Ok(adv.map(|l, m, a| {
            if l == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                a - omega.get(l, m) * (nu * (l * (l + 1)) as f64)
            }
        }))
    }

    fn fit(&self, omega: &SpectralField) -> Result<SpectralField> {
        if omega.lmax() > self.cfg.lmax {
            return Err(Error::InvalidConfig(format!(
                "initial degree {} exceeds lmax {}",
                omega.lmax(),
                self.cfg.lmax
            )));
        }
        Ok(omega.resized(self.cfg.lmax))
    }

    /// One classical fourth-order Runge–Kutta step.
    pub fn step(&self, omega: &SpectralField) -> Result<SpectralField> {
        let dt = self.cfg.dt;
        let k1 = self.rhs(omega)?;
        let k2 = self.rhs(&omega.axpy(0.5 * dt, &k1))?;
        let k3 = self.rhs(&omega.axpy(0.5 * dt, &k2))?;
        let k4 = self.rhs(&omega.axpy(dt, &k3))?;
        let mut out = omega.clone();
        for (k, w) in [(k1, 1.0), (k2, 2.0), (k3, 2.0), (k4, 1.0)] {
            out = out.axpy(dt * w / 6.0, &k);
        }
        Ok(out)
    }

    /// Integrates `steps` steps from `omega0`, recording diagnostics after
    /// every step.
    pub fn evolve(&self, omega0: &SpectralField) -> Result<TimeSeries> {
        let mut omega = self.fit(omega0)?;
        let grid0 = synthesize(&omega, &self.plan)?;
        let max0 = grid0.max_abs();
        let mut series = TimeSeries::default();
        series.record(0.0, &omega, &grid0, &grid0, self.cfg.band);
        for n in 1..=self.cfg.steps {
            omega = self.step(&omega)?;
            let t = n as f64 * self.cfg.dt;
            let g = synthesize(&omega, &self.plan)?;
            let max = g.max_abs();
            if !max.is_finite() || max > 10.0 * max0 && max0 > 0.0 {
                return Err(Error::InstabilityDetected { time: t, max_omega: max });
            }
            series.record(t, &omega, &g, &grid0, self.cfg.band);
        }
        series.final_state = omega;
        Ok(series)
    }
}

/// Spectral tendency for a one-off evaluation.
pub fn rhs(omega: &SpectralField, cfg: &EvolutionConfig) -> Result<SpectralField> {
    Integrator::new(*cfg)?.rhs(omega)
}

pub fn evolve(omega0: &SpectralField, cfg: &EvolutionConfig) -> Result<TimeSeries> {
    Integrator::new(*cfg)?.evolve(omega0)
}

/// ½∫|∇ψ|² dA = ½ Σ |a_{l,m}|² / (l(l+1)).
pub fn energy(omega: &SpectralField) -> f64 {
    0.5 * omega.iter().filter(|(l, _, _)| *l > 0).map(|(l, _, a)| a.norm_sqr() / (l * (l + 1)) as f64).sum::<f64>()
}

/// ½∫ω² dA = ½ Σ |a_{l,m}|².
pub fn enstrophy(omega: &SpectralField) -> f64 {
    0.5 * omega.iter().map(|(_, _, a)| a.norm_sqr()).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub enstrophy: Vec<f64>,
    pub max_omega: Vec<f64>,
    /// max |ω(t) − ω(0)| on the configured band of the transform grid.
    pub drift: Vec<f64>,
    pub final_state: SpectralField,
}

impl Default for TimeSeries {
    fn default() -> Self {
        Self {
            times: Vec::new(),
            energy: Vec::new(),
            enstrophy: Vec::new(),
            max_omega: Vec::new(),
            drift: Vec::new(),
            final_state: SpectralField::zeros(0),
        }
    }
}

impl TimeSeries {
    fn record(&mut self, t: f64, omega: &SpectralField, g: &ScalarField, g0: &ScalarField, band: Band) {
        self.times.push(t);
        self.energy.push(energy(omega));
        self.enstrophy.push(enstrophy(omega));
        self.max_omega.push(g.max_abs());
        let rows = g.grid().band_rows(band);
        let nlon = g.grid().nlon();
        let lo = rows.start * nlon;
        let hi = rows.end * nlon;
        let d = g.values()[lo..hi]
            .iter()
            .zip(&g0.values()[lo..hi])
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        self.drift.push(d);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "energy", "enstrophy", "max_omega", "drift"])?;
        for k in 0..self.len() {
            out.write_record([
                sci(self.times[k]),
                sci(self.energy[k]),
                sci(self.enstrophy[k]),
                sci(self.max_omega[k]),
                sci(self.drift[k]),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Evolves the degree-`lmax` projection of the basic solution to `t_final`
/// and returns max |ω(t_final) − ω(0)| on the default band.
pub fn steadiness_drift(p: BasicSolutionParams, lmax: usize, nu: f64, t_final: f64) -> Result<f64> {
    if p.k2 != 0.0 {
        return Err(Error::InvalidParams("steadiness needs K2 = 0".into()));
    }
    if !(t_final >= 0.0) {
        return Err(Error::InvalidConfig(format!("t_final must be >= 0, got {t_final}")));
    }
    if t_final == 0.0 {
        return Ok(0.0);
    }
    let l = lmax as f64;
    let dt_max = if nu > 0.0 { (0.01f64).min(1.0 / (nu * l * (l + 1.0))) } else { 0.01 };
    let steps = (t_final / dt_max).ceil() as usize;
    let cfg = EvolutionConfig { nu, dt: t_final / steps as f64, steps, lmax, dealias: true, band: Band::DEFAULT };
    let series = evolve(&project_basic(p, lmax), &cfg)?;
    Ok(*series.drift.last().expect("series has steps + 1 rows"))
}
