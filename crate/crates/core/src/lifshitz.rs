//! Matsubara summation and semi-infinite quadrature for the plate pressure and
//! the cylinder-plate force and gradient in the proximity-force description.

use std::cell::RefCell;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, BOLTZMANN_EV, HBAR_C, HBAR_C_EV_M, ROOM_TEMPERATURE};
use crate::dielectric::{zero_frequency_character, PermittivityModel, ZeroFreqBehavior};
use crate::error::{domain, CasimirError, Result};
use crate::quadrature::{integrate_to_infinity, QuadratureSpec};
use crate::reflection::{log_sq_from_susceptibility, log_sq_zero_frequency, LogReflection};
use crate::specfun::{shared, ZETA3};

/// Separation `a`, cylinder radius and length, all in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub a: f64,
    pub radius: f64,
    pub length: f64,
}

/// Above this `a/R` the proximity-force description is flagged.
pub const PFA_WARNING_RATIO: f64 = 0.05;

impl Geometry {
    pub fn new(a: f64, radius: f64, length: f64) -> Result<Self> {
        for (name, x) in [("a", a), ("R", radius), ("L", length)] {
            if !(x > 0.0) || !x.is_finite() {
                return domain(format!("{name} must be positive and finite, got {x}"));
            }
        }
        Ok(Self { a, radius, length })
    }

    pub fn with_separation(&self, a: f64) -> Result<Self> {
        Self::new(a, self.radius, self.length)
    }

    pub fn a_over_r(&self) -> f64 {
        self.a / self.radius
    }

    pub fn pfa_warning(&self) -> Option<Warning> {
        let ratio = self.a_over_r();
        (ratio > PFA_WARNING_RATIO).then_some(Warning::PfaValidity { a_over_r: ratio })
    }

    /// `sqrt(R / 2a)`
    fn curvature_factor(&self) -> f64 {
        (self.radius / (2.0 * self.a)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub temperature: f64,
}

impl ThermalState {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return domain(format!("temperature must be finite and >= 0, got {temperature}"));
        }
        Ok(Self { temperature })
    }

    pub fn zero() -> Self {
        Self { temperature: 0.0 }
    }

    pub fn room() -> Self {
        Self { temperature: ROOM_TEMPERATURE }
    }

    /// `tau = 4 pi k_B T a / (hbar c)` at separation `a` (m).
    pub fn tau(&self, a: f64) -> f64 {
        4.0 * PI * BOLTZMANN_EV * self.temperature * a / HBAR_C_EV_M
    }

    pub fn is_zero(&self) -> bool {
        self.temperature == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    PfaValidity { a_over_r: f64 },
    OverhangPrecondition { l1: f64, h: f64, a: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::PfaValidity { a_over_r } => write!(f, "a/R = {a_over_r:.4} exceeds {PFA_WARNING_RATIO}"),
            Warning::OverhangPrecondition { l1, h, a } => {
                write!(f, "overhang expansion needs L1, H >> a (L1 = {l1:e} m, H = {h:e} m, a = {a:e} m)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceResult {
    /// Force (N) or gradient (N/m).
    pub value: f64,
    /// `value / L`
    pub per_length: f64,
    /// Index of the last Matsubara term kept; 0 at zero temperature.
    pub l_used: usize,
    /// Bound on the relative size of the discarded tail.
    pub truncation_estimate: f64,
    pub warnings: Vec<Warning>,
}

impl ForceResult {
    pub(crate) fn scaled(&self, factor: f64) -> Self {
        Self { value: self.value * factor, per_length: self.per_length * factor, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Force,
    Gradient,
}

/// Below this `A` the tilt kernels use their Taylor series in `A v`.
pub(crate) const TILT_SERIES_THRESHOLD: f64 = 1e-3;

/// Integrand family in the dimensionless `v` variable; each evaluates the
/// `n`-sum for one polarization given `mu = v - ln r^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Kernel {
    /// `v^2 / (e^mu - 1)`
    Pressure,
    /// `v^{3/2} Li_{1/2}(e^{-mu})`
    Force,
    /// `v^{5/2} Li_{-1/2}(e^{-mu})`
    Gradient,
    /// `v^{3/2} sum_n e^{-n mu} n^{-1/2} sinh(A n v)/(A n v)`
    TiltedForce(f64),
    /// `v^{5/2} sum_n e^{-n mu} n^{1/2} sinh(A n v)/(A n v)`
    TiltedGradient(f64),
}

pub(crate) fn sinh_ratio_sum(base: f64, a: f64, v: f64, mu: f64) -> f64 {
    // sum_n e^{-n mu} n^{-base} sinh(A n v) / (A n v)
    let h = a * v;
    if a < TILT_SERIES_THRESHOLD {
        let mut term_scale = 1.0;
        let mut total = 0.0;
        for j in 0..3 {
            if j > 0 {
                let k = 2 * j;
                term_scale *= h * h / ((k * (k + 1)) as f64);
            }
            total += term_scale * shared(base - 2.0 * j as f64).eval_mu(mu);
        }
        total
    } else {
        let p = shared(base + 1.0);
        (p.eval_mu(mu - h) - p.eval_mu(mu + h)) / (2.0 * h)
    }
}

impl Kernel {
    fn power(&self) -> f64 {
        match self {
            Kernel::Pressure => 2.0,
            Kernel::Force | Kernel::TiltedForce(_) => 1.5,
            Kernel::Gradient | Kernel::TiltedGradient(_) => 2.5,
        }
    }

    /// `n`-sum for one polarization; `mu = +inf` for a vanishing coefficient.
    fn sum(&self, v: f64, mu: f64) -> f64 {
        if mu == f64::INFINITY {
            return 0.0;
        }
        match *self {
            Kernel::Pressure => 1.0 / mu.exp_m1(),
            Kernel::Force => shared(0.5).eval_mu(mu),
            Kernel::Gradient => shared(-0.5).eval_mu(mu),
            Kernel::TiltedForce(a) => sinh_ratio_sum(0.5, a, v, mu),
            Kernel::TiltedGradient(a) => sinh_ratio_sum(-0.5, a, v, mu),
        }
    }

    fn integrand(&self, v: f64, log_r: LogReflection) -> f64 {
        let s = self.sum(v, v - log_r.tm) + self.sum(v, v - log_r.te);
        v.powf(self.power()) * s
    }
}

/// Reflection data that is constant along one `v` integral.
#[derive(Debug, Clone, Copy)]
enum Reflectivity {
    Ideal,
    ZeroFrequency(ZeroFreqBehavior),
    Material { zeta: f64, chi: f64 },
}

impl Reflectivity {
    fn log_sq(&self, v: f64) -> LogReflection {
        match *self {
            Reflectivity::Ideal => LogReflection::IDEAL,
            Reflectivity::ZeroFrequency(b) => log_sq_zero_frequency(b, v),
            Reflectivity::Material { zeta, chi } => log_sq_from_susceptibility(v, zeta, chi),
        }
    }
}

pub(crate) struct Engine<'m> {
    model: &'m PermittivityModel,
    a: f64,
    zero: ZeroFreqBehavior,
    kernel: Kernel,
    quad: QuadratureSpec,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Summation {
    pub value: f64,
    pub l_used: usize,
    pub truncation_estimate: f64,
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

impl<'m> Engine<'m> {
    pub(crate) fn new(model: &'m PermittivityModel, a: f64, kernel: Kernel, quad: QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        if let Kernel::TiltedForce(t) | Kernel::TiltedGradient(t) = kernel {
            if !(0.0..1.0).contains(&t) {
                return domain(format!("tilt parameter must lie in [0, 1), got {t}"));
            }
        }
        Ok(Self { model, a, zero: zero_frequency_character(model, a), kernel, quad })
    }

    fn reflectivity(&self, zeta: f64) -> Result<Reflectivity> {
        if matches!(self.model, PermittivityModel::IdealMetal) {
            return Ok(Reflectivity::Ideal);
        }
        if zeta == 0.0 {
            return Ok(Reflectivity::ZeroFrequency(self.zero));
        }
        let xi = zeta * HBAR_C_EV_M / (2.0 * self.a);
        let chi = self.model.susceptibility(xi)?;
        if !(chi >= 0.0) {
            return domain(format!("negative susceptibility {chi} at xi = {xi} eV"));
        }
        Ok(Reflectivity::Material { zeta, chi })
    }

    /// `int_zeta^inf v^p [K_TM + K_TE] dv`
    pub(crate) fn v_integral(&self, zeta: f64, rel_tol: f64) -> Result<f64> {
        let refl = self.reflectivity(zeta)?;
        let kernel = self.kernel;
        let r = integrate_to_infinity(|v| kernel.integrand(v, refl.log_sq(v)), zeta, rel_tol, self.quad.max_subdivisions)?;
        Ok(r.value)
    }

    /// Matsubara term with the `l = 0` half weight applied.
    fn term(&self, l: usize, tau: f64) -> Result<f64> {
        let weight = if l == 0 { 0.5 } else { 1.0 };
        Ok(weight * self.v_integral(tau * l as f64, self.quad.rel_tol)?)
    }

    /// Primed sum over `l` with `tau > 0`.
    pub(crate) fn matsubara(&self, tau: f64) -> Result<Summation> {
        let rel_tol = self.quad.rel_tol;
        let mut acc = Kahan::default();
        let mut small_run = 0;
        let mut next = 0usize;
        // Terms decay roughly like e^{-tau l}; size the first batch to cover that.
        let mut batch = ((45.0 / tau) as usize + 2).clamp(4, 256);
        loop {
            if next >= self.quad.max_matsubara {
                return Err(CasimirError::Convergence(format!(
                    "Matsubara sum not converged after {} terms (tau = {tau:e})",
                    self.quad.max_matsubara
                )));
            }
            let end = (next + batch).min(self.quad.max_matsubara);
            let terms: Vec<Result<f64>> = if self.quad.parallel {
                (next..end).into_par_iter().map(|l| self.term(l, tau)).collect()
            } else {
                (next..end).map(|l| self.term(l, tau)).collect()
            };
            for (i, t) in terms.into_iter().enumerate() {
                let t = t?;
                acc.add(t);
                if t.abs() < rel_tol * acc.sum.abs() {
                    small_run += 1;
                } else {
                    small_run = 0;
                }
                if small_run >= 3 {
                    let tail = t.abs() / (-(-tau).exp_m1());
                    return Ok(Summation {
                        value: acc.sum,
                        l_used: next + i,
                        truncation_estimate: tail / acc.sum.abs(),
                    });
                }
            }
            next = end;
            batch = 64;
        }
    }

    /// `int_0^inf dzeta int_zeta^inf dv (...)`, the zero-temperature limit of
    /// the sum with `tau sum_l' -> int dzeta`.
    pub(crate) fn zeta_integral(&self) -> Result<f64> {
        let failure: RefCell<Option<CasimirError>> = RefCell::new(None);
        let inner_tol = 0.1 * self.quad.rel_tol;
        let r = integrate_to_infinity(
            |zeta| match self.v_integral(zeta, inner_tol) {
                Ok(x) => x,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            self.quad.rel_tol,
            self.quad.max_subdivisions,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(r?.value)
    }
}

/// Prefactor per unit length turning the dimensionless sum into SI units.
/// `energy` is `k_B T` or, at zero temperature, `hbar c / (4 pi a)`.
fn prefactor(kernel: Kernel, geom: &Geometry, energy: f64) -> f64 {
    let a = geom.a;
    match kernel {
        Kernel::Pressure => -energy / (8.0 * PI * a.powi(3)),
        Kernel::Force | Kernel::TiltedForce(_) => -energy / (4.0 * PI.sqrt() * a * a) * geom.curvature_factor(),
        Kernel::Gradient | Kernel::TiltedGradient(_) => energy / (4.0 * PI.sqrt() * a.powi(3)) * geom.curvature_factor(),
    }
}

pub(crate) fn evaluate(
    geom: &Geometry,
    thermal: ThermalState,
    model: &PermittivityModel,
    kernel: Kernel,
    quad: &QuadratureSpec,
) -> Result<ForceResult> {
    let engine = Engine::new(model, geom.a, kernel, *quad)?;
    let (sum, energy) = if thermal.is_zero() {
        let value = engine.zeta_integral()?;
        (Summation { value, l_used: 0, truncation_estimate: 0.0 }, HBAR_C / (4.0 * PI * geom.a))
    } else {
        (engine.matsubara(thermal.tau(geom.a))?, BOLTZMANN * thermal.temperature)
    };
    let per_length = prefactor(kernel, geom, energy) * sum.value;
    Ok(ForceResult {
        value: per_length * geom.length,
        per_length,
        l_used: sum.l_used,
        truncation_estimate: sum.truncation_estimate,
        warnings: geom.pfa_warning().into_iter().collect(),
    })
}

/// Pressure between two parallel plates (Pa, negative for attraction).
pub fn plate_pressure(a: f64, thermal: ThermalState, model: &PermittivityModel, quad: &QuadratureSpec) -> Result<f64> {
    let geom = Geometry::new(a, 1.0, 1.0)?;
    let engine = Engine::new(model, a, Kernel::Pressure, *quad)?;
    if thermal.is_zero() {
        let energy = HBAR_C / (4.0 * PI * a);
        Ok(prefactor(Kernel::Pressure, &geom, energy) * engine.zeta_integral()?)
    } else {
        let s = engine.matsubara(thermal.tau(a))?;
        Ok(prefactor(Kernel::Pressure, &geom, BOLTZMANN * thermal.temperature) * s.value)
    }
}

pub fn cylinder_force(
    geom: &Geometry,
    thermal: ThermalState,
    model: &PermittivityModel,
    quad: &QuadratureSpec,
) -> Result<ForceResult> {
    evaluate(geom, thermal, model, Kernel::Force, quad)
}

pub fn cylinder_force_gradient(
    geom: &Geometry,
    thermal: ThermalState,
    model: &PermittivityModel,
    quad: &QuadratureSpec,
) -> Result<ForceResult> {
    evaluate(geom, thermal, model, Kernel::Gradient, quad)
}

pub fn cylinder_quantity(
    geom: &Geometry,
    thermal: ThermalState,
    model: &PermittivityModel,
    which: Quantity,
    quad: &QuadratureSpec,
) -> Result<ForceResult> {
    match which {
        Quantity::Force => cylinder_force(geom, thermal, model, quad),
        Quantity::Gradient => cylinder_force_gradient(geom, thermal, model, quad),
    }
}

pub fn zero_temperature_force(geom: &Geometry, model: &PermittivityModel, quad: &QuadratureSpec) -> Result<ForceResult> {
    evaluate(geom, ThermalState::zero(), model, Kernel::Force, quad)
}

pub fn zero_temperature_gradient(
    geom: &Geometry,
    model: &PermittivityModel,
    quad: &QuadratureSpec,
) -> Result<ForceResult> {
    evaluate(geom, ThermalState::zero(), model, Kernel::Gradient, quad)
}

/// Ideal-metal force at zero temperature, `-pi^3 hbar c L / (384 a^3) sqrt(R/2a)`.
pub fn ideal_metal_force(geom: &Geometry) -> f64 {
    -PI.powi(3) * HBAR_C * geom.length / (384.0 * geom.a.powi(3)) * geom.curvature_factor()
}

/// Ideal-metal gradient at zero temperature, `7 pi^3 hbar c L / (768 a^4) sqrt(R/2a)`.
pub fn ideal_metal_gradient(geom: &Geometry) -> f64 {
    7.0 * PI.powi(3) * HBAR_C * geom.length / (768.0 * geom.a.powi(4)) * geom.curvature_factor()
}

/// Ideal-metal plate pressure at zero temperature, `-pi^2 hbar c / (240 a^4)`.
pub fn ideal_metal_pressure(a: f64) -> f64 {
    -PI * PI * HBAR_C / (240.0 * a.powi(4))
}

/// Leading high-temperature plate pressure: the `l = 0` term alone.
pub fn high_temperature_pressure(a: f64, temperature: f64, behavior: ZeroFreqBehavior) -> Result<f64> {
    let ideal = -ZETA3 * BOLTZMANN * temperature / (4.0 * PI * a.powi(3));
    match behavior {
        ZeroFreqBehavior::IdealMetal => Ok(ideal),
        ZeroFreqBehavior::DrudeLike => Ok(0.5 * ideal),
        _ => Err(CasimirError::UnsupportedModel("high-temperature pressure is implemented for metals only")),
    }
}

/// Largest `delta_0 / a` accepted by the plasma high-temperature expansion.
pub const PLASMA_EXPANSION_LIMIT: f64 = 0.5;

/// Second-order bracket multiplying the ideal-metal asymptote for the
/// plasma model, with `x = delta_0 / a`.
pub fn plasma_bracket(which: Quantity, x: f64) -> Result<f64> {
    if !(0.0..PLASMA_EXPANSION_LIMIT).contains(&x) {
        return domain(format!("delta_0/a = {x} is outside the perturbative range [0, {PLASMA_EXPANSION_LIMIT})"));
    }
    Ok(match which {
        Quantity::Force => 1.0 - 2.5 * x + 8.75 * x * x,
        Quantity::Gradient => 1.0 - 3.5 * x + 15.75 * x * x,
    })
}

fn high_temperature_core(geom: &Geometry, temperature: f64, which: Quantity, li3: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return domain("high-temperature asymptote needs T > 0");
    }
    let kt = BOLTZMANN * temperature;
    let a = geom.a;
    let c = geom.curvature_factor() * geom.length;
    // li3 = Li_3(r_TM^2) + Li_3(r_TE^2) from the zero-frequency term
    Ok(match which {
        Quantity::Force => -3.0 * kt * c / (32.0 * a * a) * li3,
        Quantity::Gradient => 15.0 * kt * c / (64.0 * a.powi(3)) * li3,
    })
}

fn high_temperature(geom: &Geometry, temperature: f64, behavior: ZeroFreqBehavior, which: Quantity) -> Result<f64> {
    match behavior {
        ZeroFreqBehavior::IdealMetal => high_temperature_core(geom, temperature, which, 2.0 * ZETA3),
        ZeroFreqBehavior::DrudeLike => high_temperature_core(geom, temperature, which, ZETA3),
        ZeroFreqBehavior::PlasmaLike { skin_depth, .. } => {
            let bracket = plasma_bracket(which, skin_depth / geom.a)?;
            Ok(bracket * high_temperature_core(geom, temperature, which, 2.0 * ZETA3)?)
        }
        ZeroFreqBehavior::Dielectric { r0 } => {
            high_temperature_core(geom, temperature, which, shared_li3(r0 * r0)?)
        }
    }
}

fn shared_li3(x: f64) -> Result<f64> {
    crate::specfun::polylog(3.0, x)
}

/// Closed-form `T -> inf` force for the given zero-frequency behaviour.
pub fn high_temperature_force(geom: &Geometry, temperature: f64, behavior: ZeroFreqBehavior) -> Result<f64> {
    high_temperature(geom, temperature, behavior, Quantity::Force)
}

pub fn high_temperature_gradient(geom: &Geometry, temperature: f64, behavior: ZeroFreqBehavior) -> Result<f64> {
    high_temperature(geom, temperature, behavior, Quantity::Gradient)
}

/// High-temperature limit for a metallic plate facing a dielectric cylinder
/// (or the reverse): the static product of reflectivities is `r_0`, not `r_0^2`.
pub fn high_temperature_metal_dielectric(geom: &Geometry, temperature: f64, r0: f64, which: Quantity) -> Result<f64> {
    if !(0.0..1.0).contains(&r0) {
        return domain(format!("r0 must lie in [0, 1), got {r0}"));
    }
    high_temperature_core(geom, temperature, which, shared_li3(r0)?)
}

/// The `l = 0` contribution alone, with its half weight.
pub fn zero_frequency_term(
    geom: &Geometry,
    thermal: ThermalState,
    model: &PermittivityModel,
    which: Quantity,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if thermal.is_zero() {
        return domain("the zero-frequency term needs T > 0");
    }
    let kernel = match which {
        Quantity::Force => Kernel::Force,
        Quantity::Gradient => Kernel::Gradient,
    };
    let engine = Engine::new(model, geom.a, kernel, *quad)?;
    let t0 = 0.5 * engine.v_integral(0.0, quad.rel_tol)?;
    Ok(prefactor(kernel, geom, BOLTZMANN * thermal.temperature) * t0 * geom.length)
}

/// `[X(a, T) - X(a, 0)] / X(a, T)` for the force or its gradient.
pub fn thermal_correction_at(
    geom: &Geometry,
    thermal: ThermalState,
    model: &PermittivityModel,
    which: Quantity,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if thermal.is_zero() {
        return Ok(0.0);
    }
    let hot = cylinder_quantity(geom, thermal, model, which, quad)?.value;
    let cold = cylinder_quantity(geom, ThermalState::zero(), model, which, quad)?.value;
    Ok((hot - cold) / hot)
}

/// Relative thermal correction at room temperature.
pub fn thermal_correction(
    geom: &Geometry,
    model: &PermittivityModel,
    quad: &QuadratureSpec,
    which: Quantity,
) -> Result<f64> {
    thermal_correction_at(geom, ThermalState::room(), model, which, quad)
}
