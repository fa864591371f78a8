// SPDX-License-Identifier: Apache-2.0

//! Simulation and pulse optimization of controlled-Z gates between two
//! microwave-dressed Rydberg ions held in a linear Paul trap.
//!
//! The crate is organised bottom-up:
//!
//! * [`atomic`]: model-potential radial solver, radial and angular multipole
//!   matrix elements of the valence electron.
//! * [`crystal`]: Coulomb-crystal equilibrium, phonon modes and the
//!   dipole-dipole interaction strength between dressed ions.
//! * [`model`]: two-ion dressed-state Hamiltonians, symmetric-sector blocks,
//!   adiabatically reduced blocks and the non-Hermitian decay term.
//! * [`pulses`]: laser Rabi frequency and detuning for the three protocols.
//! * [`dynamics`]: adaptive integration of the Schrödinger equation, phase
//!   extraction and the adiabatic entangling-phase estimate.
//! * [`gatemetrics`]: Bell-state fidelities, population/phase errors and the
//!   decay-integral fidelity estimate.
//! * [`optimize`]: differential evolution and the protocol/regime workflows.
//!
//! Frequencies are angular frequencies in rad/µs with ħ = 1 unless a function
//! says otherwise. User-facing values are in 2π×MHz, see [`units`].

pub mod atomic;
pub mod config;
pub mod crystal;
pub mod dynamics;
pub mod error;
pub mod gatemetrics;
pub mod model;
pub mod ode;
pub mod optimize;
pub mod pulses;
pub mod units;

pub use error::{Error, Result};
