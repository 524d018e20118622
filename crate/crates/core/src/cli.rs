//! Command-line front end. Every flag defaults to the values used by the
//! acceptance suite.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{self, BasicSolutionParams, Hemisphere};
use crate::grid::{build_grid, surface_integral, Band, GridKind, GridSpec};
use crate::operators::ns_residual;
use crate::spharm::SpectralField;
use crate::timestep::{EvolutionConfig, Integrator};
use crate::verify::{self, PhiProfile, SuiteConfig};

#[derive(Debug, Parser)]
#[command(name = "sphereflow", version, about = "Stationary vorticity flows on the unit sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sample omega, psi and u_phi of the basic solution onto the grid.
    Fields,
    /// Pointwise steady Navier–Stokes residual of the basic solution.
    Residual,
    /// Run the verification suite; nonzero exit iff a check fails.
    Checks,
    /// Time-integrate an initial vorticity field.
    Evolve,
    /// Print total and per-hemisphere vorticity integrals.
    Gauss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    Gauss,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunConfig {
    #[arg(long, global = true, default_value_t = 256)]
    pub nlat: usize,
    #[arg(long, global = true, default_value_t = 512)]
    pub nlon: usize,
    #[arg(long, global = true, value_enum, default_value_t = GridArg::Gauss)]
    pub grid: GridArg,
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub k1: f64,
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub k2: f64,
    #[arg(long, global = true, default_value_t = 64)]
    pub lmax: usize,
    #[arg(long, global = true, default_value_t = 0.01)]
    pub nu: f64,
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, global = true, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, global = true, default_value_t = PI / 8.0)]
    pub band_lo: f64,
    #[arg(long, global = true, default_value_t = 7.0 * PI / 8.0)]
    pub band_hi: f64,
    /// Output directory.
    #[arg(long, global = true, default_value = "sphereflow-out")]
    pub out: PathBuf,
    /// basic | harmonic:L,M | file:PATH
    #[arg(long, global = true, default_value = "basic")]
    pub init: String,
    /// cosh2 | exp:A,B
    #[arg(long, global = true, default_value = "cosh2")]
    pub phi: String,
    /// Disable the 3/2-padded product grid.
    #[arg(long, global = true)]
    pub no_dealias: bool,
    /// Profile samples for the G(ψ) checks.
    #[arg(long, global = true, default_value_t = 4096)]
    pub n_theta: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Cli::parse_from(["sphereflow", "gauss"]).run
    }
}

/// Initial condition for `evolve`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Basic,
    Harmonic { l: usize, m: i64 },
    File(PathBuf),
}

impl std::str::FromStr for InitialCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "basic" {
            return Ok(Self::Basic);
        }
        if let Some(rest) = s.strip_prefix("harmonic:") {
            let (l, m) = rest
                .split_once(',')
                .ok_or_else(|| Error::InvalidConfig(format!("expected harmonic:L,M, got {s}")))?;
            let l = l.trim().parse().map_err(|_| Error::InvalidConfig(format!("bad degree in {s}")))?;
            let m = m.trim().parse().map_err(|_| Error::InvalidConfig(format!("bad order in {s}")))?;
            return Ok(Self::Harmonic { l, m });
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(Self::File(PathBuf::from(path)));
        }
        Err(Error::InvalidConfig(format!("unknown initial condition {s}")))
    }
}

pub fn parse_phi(s: &str) -> Result<PhiProfile> {
    if s == "cosh2" {
        return Ok(PhiProfile::Cosh2);
    }
    let bad = || Error::InvalidConfig(format!("expected cosh2 or exp:A,B, got {s}"));
    let rest = s.strip_prefix("exp:").ok_or_else(bad)?;
    let (a, b) = rest.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a > 0.0) || !b.is_finite() {
        return Err(bad());
    }
    Ok(PhiProfile::Exponential { a, b })
}

impl RunConfig {
    pub fn grid_spec(&self) -> GridSpec {
        let kind = match self.grid {
            GridArg::Gauss => GridKind::GaussLegendre,
            GridArg::Uniform => GridKind::UniformInterior,
        };
        GridSpec { nlat: self.nlat, nlon: self.nlon, kind }
    }

    pub fn params(&self) -> Result<BasicSolutionParams> {
        if !self.k1.is_finite() || !self.k2.is_finite() {
            return Err(Error::InvalidConfig("k1 and k2 must be finite".into()));
        }
        Ok(BasicSolutionParams::new(self.k1, self.k2))
    }

    pub fn band(&self) -> Result<Band> {
        Band::new(self.band_lo, self.band_hi).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn evolution(&self) -> Result<EvolutionConfig> {
        let cfg = EvolutionConfig {
            nu: self.nu,
            dt: self.dt,
            steps: self.steps,
            lmax: self.lmax,
            dealias: !self.no_dealias,
            band: self.band()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rejects invalid values before any computation.
    pub fn validate(&self, command: Command) -> Result<()> {
        self.grid_spec().validate().map_err(|e| Error::InvalidConfig(e.to_string()))?;
        self.params()?;
        self.band()?;
        if !(self.nu >= 0.0) {
            return Err(Error::InvalidConfig(format!("nu must be >= 0, got {}", self.nu)));
        }
        match command {
            Command::Evolve => {
                self.evolution()?;
                self.init.parse::<InitialCondition>()?;
            }
            Command::Checks => {
                parse_phi(&self.phi)?;
                if self.lmax < 1 {
                    return Err(Error::InvalidConfig("lmax must be >= 1".into()));
                }
                if self.n_theta < 2 {
                    return Err(Error::InvalidConfig("n-theta must be >= 2".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// Writes `omega.csv`, `psi.csv`, `uphi.csv` under `cfg.out`.
pub fn cmd_fields(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate(Command::Fields)?;
    let grid = build_grid(cfg.grid_spec())?;
    let p = cfg.params()?;
    ensure_dir(&cfg.out)?;
    let files = [
        ("omega.csv", exact::omega_field(&grid, p)),
        ("psi.csv", exact::psi_field(&grid, p)),
        ("uphi.csv", exact::u_phi_field(&grid, p)),
    ];
    let mut written = Vec::new();
    for (name, field) in files {
        let path = cfg.out.join(name);
        field.save_csv(&path)?;
        written.push(path);
    }
    Ok(written)
}

/// Writes `residual.csv` and returns the band maximum.
pub fn cmd_residual(cfg: &RunConfig) -> Result<f64> {
    cfg.validate(Command::Residual)?;
    let grid = build_grid(cfg.grid_spec())?;
    let p = cfg.params()?;
    let r = ns_residual(&exact::psi_field(&grid, p), &exact::omega_field(&grid, p), cfg.nu)?;
    ensure_dir(&cfg.out)?;
    r.save_csv(cfg.out.join("residual.csv"))?;
    Ok(r.max_abs_in_band(cfg.band()?))
}

/// Runs the check suite, writes `checks.csv` and returns whether all passed.
pub fn cmd_checks(cfg: &RunConfig) -> Result<bool> {
    cfg.validate(Command::Checks)?;
    let band = cfg.band()?;
    if let Some(w) = verify::near_pole_warning(band) {
        eprintln!("warning: {w}");
    }
    let suite = SuiteConfig {
        grid: cfg.grid_spec(),
        params: cfg.params()?,
        nu: cfg.nu,
        band,
        lmax: cfg.lmax,
        n_theta: cfg.n_theta,
        phi: parse_phi(&cfg.phi)?,
    };
    let reports = verify::run_suite(&suite)?;
    ensure_dir(&cfg.out)?;
    verify::write_reports(&reports, std::fs::File::create(cfg.out.join("checks.csv"))?)?;
    for r in &reports {
        eprintln!("{:<24} {:>12.4e} <= {:>8.1e}  {}", r.name, r.max_abs_residual, r.tolerance, if r.pass { "pass" } else { "FAIL" });
    }
    Ok(reports.iter().all(|r| r.pass))
}

/// Writes `timeseries.csv` and `final.csv` (spectral coefficients).
pub fn cmd_evolve(cfg: &RunConfig) -> Result<PathBuf> {
    cfg.validate(Command::Evolve)?;
    let ecfg = cfg.evolution()?;
    let omega0 = match cfg.init.parse::<InitialCondition>()? {
        InitialCondition::Basic => {
            let p = cfg.params()?;
            if p.k2 != 0.0 {
                return Err(Error::InvalidConfig("basic initial condition needs k2 = 0".into()));
            }
            exact::project_basic(p, ecfg.lmax)
        }
        InitialCondition::Harmonic { l, m } => SpectralField::single_mode(ecfg.lmax, l, m, Complex64::new(1.0, 0.0))
            .map_err(|e| Error::InvalidConfig(e.to_string()))?,
        InitialCondition::File(path) => SpectralField::load_csv(path)?,
    };
    let series = Integrator::new(ecfg)?.evolve(&omega0)?;
    ensure_dir(&cfg.out)?;
    let path = cfg.out.join("timeseries.csv");
    series.save_csv(&path)?;
    series.final_state.save_csv(cfg.out.join("final.csv"))?;
    Ok(path)
}

/// (total, north, south) vorticity integrals; total is evaluated on the grid.
pub fn cmd_gauss(cfg: &RunConfig) -> Result<(f64, f64, f64)> {
    cfg.validate(Command::Gauss)?;
    let grid = build_grid(cfg.grid_spec())?;
    let p = cfg.params()?;
    let total = surface_integral(&exact::omega_field(&grid, p));
    let north = exact::hemisphere_vorticity_integral(p, Hemisphere::North);
    let south = exact::hemisphere_vorticity_integral(p, Hemisphere::South);
    Ok((total, north, south))
}

/// Executes one command and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let cfg = &cli.run;
    match cli.command {
        Command::Fields => {
            for path in cmd_fields(cfg)? {
                println!("{}", path.display());
            }
        }
        Command::Residual => println!("max_abs_residual {:.16e}", cmd_residual(cfg)?),
        Command::Checks => return Ok(if cmd_checks(cfg)? { 0 } else { 1 }),
        Command::Evolve => println!("{}", cmd_evolve(cfg)?.display()),
        Command::Gauss => {
            let (total, north, south) = cmd_gauss(cfg)?;
            println!("total {total:.16e} north {north:.16e} south {south:.16e}");
        }
    }
    Ok(0)
}

/// Worker cap from `SPHEREFLOW_THREADS` (0 or unset means default).
pub fn thread_cap() -> Result<usize> {
    match std::env::var("SPHEREFLOW_THREADS") {
        Ok(v) => v.trim().parse().map_err(|_| Error::InvalidConfig(format!("SPHEREFLOW_THREADS = {v:?}"))),
        Err(_) => Ok(0),
    }
}
