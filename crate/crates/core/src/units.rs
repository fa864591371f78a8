// SPDX-License-Identifier: Apache-2.0

//! Unit conversions and physical constants (CODATA 2018).
//!
//! Gate-level quantities are stored as angular frequencies in rad/µs with
//! ħ = 1, so a value quoted as "2π × f MHz" is stored as `2π f`. Atomic
//! structure is computed in Hartree atomic units and converted to SI here.

use std::f64::consts::TAU;

/// Bohr radius in metres.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge in C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Coulomb constant 1/(4πε₀) in N·m²/C².
pub const COULOMB_CONSTANT: f64 = 8.987_551_792_3e9;
/// Hartree energy in J.
pub const HARTREE: f64 = 4.359_744_722_207_1e-18;
/// Fine-structure constant.
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;
/// Atomic mass unit in kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Hartree energy expressed in cm⁻¹.
pub const HARTREE_IN_INVERSE_CM: f64 = 219_474.631_363_20;

/// 2π×MHz → rad/µs.
#[inline]
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    TAU * f_mhz
}

/// rad/µs → 2π×MHz.
#[inline]
pub fn angular_to_mhz(omega: f64) -> f64 {
    omega / TAU
}

/// rad/s → 2π×MHz.
#[inline]
pub fn rad_per_s_to_mhz(omega: f64) -> f64 {
    omega / TAU * 1e-6
}

/// 2π×MHz → rad/s.
#[inline]
pub fn mhz_to_rad_per_s(f_mhz: f64) -> f64 {
    TAU * f_mhz * 1e6
}

/// Length in Bohr radii → metres.
#[inline]
pub fn bohr_to_meters(r: f64) -> f64 {
    r * BOHR_RADIUS
}
