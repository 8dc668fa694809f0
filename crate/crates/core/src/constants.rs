//! CODATA 2018 constants and the eV/nm conversions used at the unit boundary.

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// ħc in J·m.
pub const HBAR_C: f64 = HBAR * SPEED_OF_LIGHT;
/// ħc in eV·nm.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;
/// ħc in eV·m.
pub const HBAR_C_EV_M: f64 = HBAR_C_EV_NM * 1e-9;
/// Boltzmann constant, eV/K.
pub const BOLTZMANN_EV: f64 = 8.617_333_262e-5;
/// Temperature at which all quoted thermal corrections are evaluated, K.
pub const ROOM_TEMPERATURE: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub k_b: f64,
    pub hbar: f64,
    pub c: f64,
    pub hbar_c_ev_nm: f64,
    pub k_b_room_ev: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        k_b: BOLTZMANN,
        hbar: HBAR,
        c: SPEED_OF_LIGHT,
        hbar_c_ev_nm: HBAR_C_EV_NM,
        k_b_room_ev: BOLTZMANN_EV * ROOM_TEMPERATURE,
    };
}
