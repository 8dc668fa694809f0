//! Flat TOML configuration merged with command-line flags (flags win), and
//! its resolution into SI units.

use std::path::{Path, PathBuf};

use casimir_core::dielectric::{DrudeParams, OpticalTable, OscillatorSet, PermittivityModel, StaticDielectric};
use casimir_core::lifshitz::{Geometry, ThermalState};
use casimir_core::quadrature::QuadratureSpec;
use casimir_core::tilt::TiltParams;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{config_error, CliError, CliResult};

/// Conversions divide by these so that e.g. 300 nm maps to exactly `300e-9`.
const NM_PER_M: f64 = 1e9;
const UM_PER_M: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ideal,
    Drude,
    Plasma,
    Dielectric,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every key can come from the config file or from a flag of the same name.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Flat TOML file with any of the keys below
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Separation, nm
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<f64>,

    /// Separation sweep MIN:MAX:N or MIN:MAX:N:log, nm
    #[arg(long = "a-sweep", global = true)]
    pub a_sweep: Option<String>,

    /// Cylinder radius, um
    #[arg(long = "R", global = true)]
    #[serde(rename = "R")]
    pub radius: Option<f64>,

    /// Cylinder length, um
    #[arg(long = "L", global = true)]
    #[serde(rename = "L")]
    pub length: Option<f64>,

    /// Temperature, K
    #[arg(long = "T", global = true, allow_hyphen_values = true)]
    #[serde(rename = "T")]
    pub temperature: Option<f64>,

    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelKind>,

    /// Plasma frequency, eV
    #[arg(long = "omega-p", global = true)]
    pub omega_p: Option<f64>,

    /// Drude relaxation, eV
    #[arg(long, global = true)]
    pub gamma: Option<f64>,

    /// Static permittivity of the dielectric model
    #[arg(long, global = true)]
    pub eps0: Option<f64>,

    /// Optical data file (omega_eV im_eps, or omega_eV n k)
    #[arg(long = "optical-data", global = true)]
    pub optical_data: Option<PathBuf>,

    /// Tilt angle, rad
    #[arg(long, global = true, conflicts_with = "a_theta")]
    pub theta: Option<f64>,

    /// Dimensionless tilt theta L / (2a), held fixed across a sweep
    #[arg(long = "a-theta", global = true)]
    pub a_theta: Option<f64>,

    /// Relative tolerance for quadrature and Matsubara truncation
    #[arg(long = "rel-tol", global = true)]
    pub rel_tol: Option<f64>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write an SVG line plot
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,

    /// Output file (default: stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Plate-edge distances for the overhang report, um
    #[arg(long = "l1", global = true, value_delimiter = ',')]
    pub l1: Option<Vec<f64>>,
}

impl Options {
    /// Reads the config file named by `--config`, if any, and overlays the flags.
    pub fn merged(self) -> CliResult<Options> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = Self::from_file(&path)?;
        Ok(self.over(file))
    }

    pub fn from_file(path: &Path) -> CliResult<Options> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// `self` where set, otherwise `base`.
    pub fn over(self, base: Options) -> Options {
        Options {
            config: self.config.or(base.config),
            a: self.a.or(base.a),
            a_sweep: self.a_sweep.or(base.a_sweep),
            radius: self.radius.or(base.radius),
            length: self.length.or(base.length),
            temperature: self.temperature.or(base.temperature),
            model: self.model.or(base.model),
            omega_p: self.omega_p.or(base.omega_p),
            gamma: self.gamma.or(base.gamma),
            eps0: self.eps0.or(base.eps0),
            optical_data: self.optical_data.or(base.optical_data),
            theta: self.theta.or(base.theta),
            a_theta: self.a_theta.or(base.a_theta),
            rel_tol: self.rel_tol.or(base.rel_tol),
            format: self.format.or(base.format),
            plot: self.plot.or(base.plot),
            out: self.out.or(base.out),
            l1: self.l1.or(base.l1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Separations in metres, ascending.
    pub points: Vec<f64>,
    pub log: bool,
}

impl Sweep {
    /// `MIN:MAX:N` or `MIN:MAX:N:log` in nm.
    pub fn parse(spec: &str) -> CliResult<Sweep> {
        let parts: Vec<&str> = spec.split(':').collect();
        let (log, nums) = match parts.as_slice() {
            [lo, hi, n] => (false, (*lo, *hi, *n)),
            [lo, hi, n, "log"] => (true, (*lo, *hi, *n)),
            [lo, hi, n, "lin"] => (false, (*lo, *hi, *n)),
            _ => return config_error(format!("sweep `{spec}` must look like MIN:MAX:N or MIN:MAX:N:log")),
        };
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad number `{s}` in sweep `{spec}`")));
        let lo = num(nums.0)?;
        let hi = num(nums.1)?;
        let n: usize = nums.2.trim().parse().map_err(|_| CliError::Config(format!("bad point count in sweep `{spec}`")))?;
        if !(lo > 0.0) || !hi.is_finite() {
            return config_error(format!("sweep bounds must be positive, got {lo}:{hi}"));
        }
        if n == 0 {
            return config_error("sweep needs at least one point");
        }
        if n == 1 {
            if lo != hi {
                return config_error("a one-point sweep needs MIN = MAX");
            }
            return Ok(Sweep { points: vec![lo / NM_PER_M], log });
        }
        if !(lo < hi) {
            return config_error(format!("sweep needs MIN < MAX, got {lo}:{hi}"));
        }
        let points = (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                let a = if log { (lo.ln() + t * (hi.ln() - lo.ln())).exp() } else { lo + t * (hi - lo) };
                a / NM_PER_M
            })
            .collect();
        Ok(Sweep { points, log })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tilt {
    Theta(f64),
    ATheta(f64),
}

impl Tilt {
    pub fn params(&self, geom: &Geometry) -> CliResult<TiltParams> {
        Ok(match *self {
            Tilt::Theta(t) => TiltParams::new(t)?,
            Tilt::ATheta(a) => TiltParams::from_a_theta(a, geom)?,
        })
    }
}

/// Fully resolved run configuration in SI units.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub separations: Option<Sweep>,
    pub radius: f64,
    pub length: f64,
    pub thermal: ThermalState,
    pub model_kind: ModelKind,
    pub model: PermittivityModel,
    pub tilt: Option<Tilt>,
    pub quad: QuadratureSpec,
    pub format: Format,
    pub plot: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Plate-edge distances in metres, with the um values as given.
    pub l1: Vec<(f64, f64)>,
    /// `key = value` lines echoed into output metadata, in a fixed order.
    pub echo: Vec<(String, String)>,
}

pub const DEFAULT_RADIUS_UM: f64 = 100.0;
pub const DEFAULT_LENGTH_UM: f64 = 100.0;
pub const DEFAULT_TEMPERATURE: f64 = 300.0;
pub const DEFAULT_L1_UM: [f64; 2] = [25.0, 50.0];

fn positive(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        config_error(format!("{name} must be positive, got {x}"))
    }
}

impl RunConfig {
    pub fn resolve(opts: &Options) -> CliResult<RunConfig> {
        let mut echo: Vec<(String, String)> = Vec::new();
        let separations = match (opts.a, &opts.a_sweep) {
            (Some(_), Some(_)) => return config_error("give either --a or --a-sweep, not both"),
            (Some(a), None) => {
                echo.push(("a_nm".into(), a.to_string()));
                Some(Sweep { points: vec![positive("a", a)? / NM_PER_M], log: false })
            }
            (None, Some(s)) => {
                echo.push(("a_sweep_nm".into(), s.clone()));
                Some(Sweep::parse(s)?)
            }
            (None, None) => None,
        };
        let radius = positive("R", opts.radius.unwrap_or(DEFAULT_RADIUS_UM))?;
        let length = positive("L", opts.length.unwrap_or(DEFAULT_LENGTH_UM))?;
        let temperature = opts.temperature.unwrap_or(DEFAULT_TEMPERATURE);
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return config_error(format!("T must be >= 0, got {temperature}"));
        }
        echo.push(("R_um".into(), radius.to_string()));
        echo.push(("L_um".into(), length.to_string()));
        echo.push(("T_K".into(), temperature.to_string()));

        let kind = opts.model.unwrap_or(ModelKind::Drude);
        let gold = DrudeParams::gold();
        let omega_p = opts.omega_p.unwrap_or(gold.omega_p);
        let gamma = opts.gamma.unwrap_or(gold.gamma);
        echo.push(("model".into(), format!("{kind:?}").to_lowercase()));
        let model = match kind {
            ModelKind::Ideal => PermittivityModel::IdealMetal,
            ModelKind::Drude => {
                echo.push(("omega_p_eV".into(), omega_p.to_string()));
                echo.push(("gamma_eV".into(), gamma.to_string()));
                PermittivityModel::Drude(DrudeParams::new(omega_p, gamma)?)
            }
            ModelKind::Plasma => {
                echo.push(("omega_p_eV".into(), omega_p.to_string()));
                PermittivityModel::PlasmaOscillators(OscillatorSet::simple_plasma(omega_p)?)
            }
            ModelKind::Dielectric => {
                let Some(eps0) = opts.eps0 else {
                    return config_error("the dielectric model needs --eps0");
                };
                echo.push(("eps0".into(), eps0.to_string()));
                PermittivityModel::Dielectric(StaticDielectric::new(eps0)?)
            }
            ModelKind::Tabulated => {
                let Some(path) = &opts.optical_data else {
                    return config_error("the tabulated model needs --optical-data");
                };
                echo.push(("optical_data".into(), path.display().to_string()));
                echo.push(("omega_p_eV".into(), omega_p.to_string()));
                echo.push(("gamma_eV".into(), gamma.to_string()));
                let table = OpticalTable::load(path)?;
                PermittivityModel::tabulated(table, DrudeParams::new(omega_p, gamma)?)
            }
        };

        let tilt = match (opts.theta, opts.a_theta) {
            (Some(_), Some(_)) => return config_error("give either --theta or --a-theta, not both"),
            (Some(t), None) => {
                echo.push(("theta_rad".into(), t.to_string()));
                Some(Tilt::Theta(t))
            }
            (None, Some(a)) => {
                echo.push(("a_theta".into(), a.to_string()));
                Some(Tilt::ATheta(a))
            }
            (None, None) => None,
        };

        let quad = match opts.rel_tol {
            Some(t) => QuadratureSpec::with_rel_tol(t)?,
            None => QuadratureSpec::default(),
        };
        echo.push(("rel_tol".into(), format!("{:e}", quad.rel_tol)));

        let l1 = opts.l1.clone().unwrap_or_else(|| DEFAULT_L1_UM.to_vec());
        for x in &l1 {
            positive("l1", *x)?;
        }

        Ok(RunConfig {
            separations,
            radius: radius / UM_PER_M,
            length: length / UM_PER_M,
            thermal: ThermalState::new(temperature)?,
            model_kind: kind,
            model,
            tilt,
            quad,
            format: opts.format.unwrap_or_default(),
            plot: opts.plot.clone(),
            out: opts.out.clone(),
            l1: l1.into_iter().map(|x| (x / UM_PER_M, x)).collect(),
            echo,
        })
    }

    pub fn geometry(&self, a: f64) -> CliResult<Geometry> {
        Ok(Geometry::new(a, self.radius, self.length)?)
    }

    /// Separations for commands that need at least one.
    pub fn points(&self) -> CliResult<&[f64]> {
        match &self.separations {
            Some(s) => Ok(&s.points),
            None => config_error("this command needs --a or --a-sweep"),
        }
    }

    pub fn log_sweep(&self) -> bool {
        self.separations.as_ref().is_some_and(|s| s.log)
    }
}
