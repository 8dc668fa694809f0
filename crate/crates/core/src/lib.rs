//! Thermal Casimir force and force gradient between a cylinder and a plate
//! within the proximity-force approximation, for ideal metals, Drude and
//! plasma-like metals, dielectrics and tabulated optical data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dielectric;
pub mod edge;
pub mod error;
pub mod experiment;
pub mod lifshitz;
pub mod quadrature;
pub mod reflection;
pub mod specfun;
pub mod tilt;

pub use constants::PhysicalConstants;
pub use dielectric::{
    eps_imag_axis, kk_transform, zero_frequency_character, DrudeParams, KkTransform, OpticalTable, Oscillator,
    OscillatorSet, PermittivityModel, StaticDielectric, ZeroFreqBehavior,
};
pub use edge::{edge_corrected_force, edge_corrected_gradient, overhang_force, total_pfa_error, EdgeParams};
pub use error::{CasimirError, Result};
pub use experiment::{infer_gradient, resonant_frequency, sensitivity_floor, OscillatorParams};
pub use lifshitz::{
    cylinder_force, cylinder_force_gradient, high_temperature_force, high_temperature_gradient, plate_pressure,
    thermal_correction, thermal_correction_at, zero_temperature_force, zero_temperature_gradient, ForceResult,
    Geometry, Quantity, ThermalState, Warning,
};
pub use quadrature::QuadratureSpec;
pub use reflection::{fresnel, zero_frequency_pair, DimensionlessPoint, ReflectionPair};
pub use specfun::{polylog, zeta3};
pub use tilt::{kappa, kappa_nm, multiplicative_force, tilted_force, tilted_gradient, TiltParams};
