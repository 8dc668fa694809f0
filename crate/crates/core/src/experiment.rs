//! Torsional-oscillator readout: conversion between the force gradient and
//! the shift of the resonant frequency.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Static-mode force sensitivity, N.
pub const STATIC_FORCE_FLOOR: f64 = 0.1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    /// Natural angular frequency, rad/s.
    pub omega_0: f64,
    /// Lever arm, m.
    pub b: f64,
    /// Moment of inertia, kg m^2.
    pub moment_i: f64,
}

impl OscillatorParams {
    pub fn new(omega_0: f64, b: f64, moment_i: f64) -> Result<Self> {
        for (name, x) in [("omega_0", omega_0), ("b", b), ("I", moment_i)] {
            if !(x > 0.0) || !x.is_finite() {
                return domain(format!("{name} must be positive and finite, got {x}"));
            }
        }
        let p = Self { omega_0, b, moment_i };
        if !p.shift_factor().is_finite() {
            return domain("b^2 / (I omega_0^2) is not finite");
        }
        Ok(p)
    }

    /// `b^2 / (I omega_0^2)`, m/N.
    pub fn shift_factor(&self) -> f64 {
        self.b * self.b / (self.moment_i * self.omega_0 * self.omega_0)
    }
}

/// `omega_0 (1 - b^2 / (I omega_0^2) dF/da)`
pub fn resonant_frequency(osc: &OscillatorParams, grad: f64) -> Result<f64> {
    let shift = osc.shift_factor() * grad;
    if !(shift.abs() < 1.0) {
        return domain(format!("relative frequency shift {shift} reaches the instability limit"));
    }
    Ok(osc.omega_0 * (1.0 - shift))
}

pub fn infer_gradient(osc: &OscillatorParams, omega_res: f64) -> Result<f64> {
    if !(omega_res > 0.0) {
        return domain(format!("resonant frequency must be positive, got {omega_res}"));
    }
    Ok((1.0 - omega_res / osc.omega_0) / osc.shift_factor())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    /// Smallest resolvable gradient, N/m.
    pub gradient: f64,
    /// Static-mode force floor, N.
    pub static_force: f64,
}

/// Gradient resolution for a frequency resolution `df_res` in Hz.
pub fn sensitivity_floor(osc: &OscillatorParams, df_res: f64) -> Result<Sensitivity> {
    if !(df_res > 0.0) {
        return domain(format!("frequency resolution must be positive, got {df_res}"));
    }
    let gradient = 2.0 * PI * df_res / osc.omega_0 / osc.shift_factor();
    Ok(Sensitivity { gradient, static_force: STATIC_FORCE_FLOOR })
}
