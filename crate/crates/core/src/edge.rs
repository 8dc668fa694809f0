//! Finite-length (edge) corrections to the ideal-metal zero-temperature
//! results and the combined error budget of the proximity-force description.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::constants::HBAR_C;
use crate::error::{domain, Result};
use crate::lifshitz::{ideal_metal_force, ideal_metal_gradient, ForceResult, Geometry, Quantity, Warning};

/// Edge coefficient of a Dirichlet scalar plate from world-line numerics.
pub const GAMMA_A: f64 = 5.23e-3;

/// Overhang expansions are flagged when `L1` or `H` is below this many `a`.
pub const OVERHANG_MIN_RATIO: f64 = 20.0;

/// `1152 gamma_a / pi^2`
pub fn c_ed() -> f64 {
    1152.0 * GAMMA_A / (PI * PI)
}

pub fn c_ed_gradient() -> f64 {
    5.0 / 7.0 * c_ed()
}

/// Curvature coefficient of the exact cylinder-plate correction, `4/pi^2 - 7/60`.
pub fn c_ex() -> f64 {
    4.0 / (PI * PI) - 7.0 / 60.0
}

pub fn c_ex_gradient() -> f64 {
    5.0 / 7.0 * c_ex()
}

/// Plate of area `s` with edge length `l_edge` at distance `z`.
/// The scalar (Dirichlet) result is doubled for the electromagnetic field.
pub fn finite_plate_force(s: f64, l_edge: f64, z: f64, em: bool) -> Result<f64> {
    if !(z > 0.0) {
        return domain(format!("separation must be positive, got {z}"));
    }
    if !(s > 0.0) || !(l_edge >= 0.0) {
        return domain("plate area must be positive and edge length non-negative");
    }
    let scalar = -PI * PI * HBAR_C * s / (480.0 * z.powi(4)) - GAMMA_A * HBAR_C * l_edge / z.powi(3);
    Ok(if em { 2.0 * scalar } else { scalar })
}

fn closed_form(value: f64, geom: &Geometry, warnings: Vec<Warning>) -> ForceResult {
    ForceResult { value, per_length: value / geom.length, l_used: 0, truncation_estimate: 0.0, warnings }
}

/// Ideal-metal force at zero temperature including the end faces, `F (1 + C_ed a/L)`.
pub fn edge_corrected_force(geom: &Geometry) -> ForceResult {
    let value = ideal_metal_force(geom) * (1.0 + c_ed() * geom.a / geom.length);
    closed_form(value, geom, geom.pfa_warning().into_iter().collect())
}

pub fn edge_corrected_gradient(geom: &Geometry) -> ForceResult {
    let value = ideal_metal_gradient(geom) * (1.0 + c_ed_gradient() * geom.a / geom.length);
    closed_form(value, geom, geom.pfa_warning().into_iter().collect())
}

/// Combined curvature and edge error at 95% confidence:
/// `min(e1 + e2, 1.1 sqrt(e1^2 + e2^2))` with `e1 = C a/R`, `e2 = C_ed a/L`.
pub fn total_pfa_error(geom: &Geometry, which: Quantity) -> f64 {
    let (c1, c2) = match which {
        Quantity::Force => (c_ex(), c_ed()),
        Quantity::Gradient => (c_ex_gradient(), c_ed_gradient()),
    };
    let e1 = c1 * geom.a / geom.radius;
    let e2 = c2 * geom.a / geom.length;
    (e1 + e2).min(1.1 * e1.hypot(e2))
}

/// Plate edge parallel to the cylinder axis, with the axis projection at
/// distance `l1` (m) from the edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeParams {
    pub gamma_a: f64,
    pub l1: f64,
}

impl EdgeParams {
    pub fn new(l1: f64) -> Result<Self> {
        if !(l1 > 0.0) || !l1.is_finite() {
            return domain(format!("L1 must be positive, got {l1}"));
        }
        Ok(Self { gamma_a: GAMMA_A, l1 })
    }

    /// Height of the cylinder surface above its lowest line at the plate edge,
    /// `R - sqrt(R^2 - L1^2)`.
    pub fn h(&self, radius: f64) -> f64 {
        let z = self.l1 / radius;
        // R (1 - sqrt(1 - z^2)) without cancellation
        radius * z * z / (1.0 + (1.0 - z * z).max(0.0).sqrt())
    }
}

pub fn f1(z: f64) -> f64 {
    let z2 = z * z;
    let root = (1.0 - z2).max(0.0).sqrt();
    120.0 - 168.0 * z2 + 35.0 * z2 * z2 + 13.0 * z.powi(7) + 4.0 * root * (30.0 - 27.0 * z2 - z2 * z2 - 2.0 * z2 * z2 * z2)
}

pub fn f2(z: f64) -> f64 {
    let z2 = z * z;
    let root = (1.0 - z2).max(0.0).sqrt();
    4.0 - 5.0 * z2 + z.powi(5) + root * (4.0 - 3.0 * z2 - z2 * z2)
}

/// Coefficient of `sqrt(a/R) a^3 / L1^3` in the overhang correction, at
/// `z = L1/R`.
pub fn overhang_f(z: f64, gamma_a: f64, radius_over_length: f64) -> f64 {
    let curvature = 8.0 * SQRT_2 / (525.0 * PI) * f1(z) / z.powi(4);
    let edge = 1536.0 * SQRT_2 * gamma_a / (5.0 * PI.powi(3)) * radius_over_length * f2(z) / (z * z);
    curvature + edge
}

/// Relative corrections to the ideal-metal force for the overhang geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverhangTerms {
    /// `C_ed a / L`
    pub end_faces: f64,
    /// `-f(L1/R) sqrt(a/R) a^3 / L1^3`
    pub plate_edge: f64,
    /// `768 sqrt(2) gamma_a / pi^3 sqrt(a/R) a^3 / H^3`
    pub cylinder_height: f64,
}

impl OverhangTerms {
    pub fn extra(&self) -> f64 {
        self.plate_edge + self.cylinder_height
    }

    pub fn factor(&self) -> f64 {
        1.0 + self.end_faces + self.extra()
    }
}

fn check_overhang(geom: &Geometry, edge: &EdgeParams) -> Result<Vec<Warning>> {
    if edge.l1 > geom.radius {
        return domain(format!("L1 = {} m exceeds the cylinder radius {} m", edge.l1, geom.radius));
    }
    let mut warnings: Vec<Warning> = geom.pfa_warning().into_iter().collect();
    let h = edge.h(geom.radius);
    let min = OVERHANG_MIN_RATIO * geom.a;
    if edge.l1 < min || h < min {
        warnings.push(Warning::OverhangPrecondition { l1: edge.l1, h, a: geom.a });
    }
    Ok(warnings)
}

pub fn overhang_terms(geom: &Geometry, edge: &EdgeParams) -> Result<OverhangTerms> {
    check_overhang(geom, edge)?;
    let a = geom.a;
    let root = (a / geom.radius).sqrt();
    let z = edge.l1 / geom.radius;
    let f = overhang_f(z, edge.gamma_a, geom.radius / geom.length);
    let h = edge.h(geom.radius);
    Ok(OverhangTerms {
        end_faces: c_ed() * a / geom.length,
        plate_edge: -f * root * (a / edge.l1).powi(3),
        cylinder_height: 768.0 * SQRT_2 * edge.gamma_a / PI.powi(3) * root * (a / h).powi(3),
    })
}

/// Ideal-metal force at zero temperature when the plate ends at distance
/// `L1` from the cylinder axis projection.
pub fn overhang_force(geom: &Geometry, edge: &EdgeParams) -> Result<ForceResult> {
    let warnings = check_overhang(geom, edge)?;
    let terms = overhang_terms(geom, edge)?;
    Ok(closed_form(ideal_metal_force(geom) * terms.factor(), geom, warnings))
}
