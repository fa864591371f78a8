// SPDX-License-Identifier: Apache-2.0

//! Single valence-electron structure of alkaline-earth ions.
//!
//! The valence electron moves in a parametric model potential (screened
//! Coulomb + core polarization + regularized spin-orbit). Radial functions
//! are obtained with Numerov shooting on a logarithmic grid; angular matrix
//! elements of spherical harmonics between fine-structure states are exact
//! sums of Clebsch–Gordan products.

mod angular;
mod radial;
mod species;

pub use angular::{angular_matrix_element, clebsch_gordan, clebsch_gordan_f64, AngularState};
pub use radial::{
    model_potential, radial_matrix_element, radial_matrix_element_si, solve_radial,
    CorePotential, GridConfig, RadialWavefunction,
};
pub use species::{Channel, IonSpecies, SpeciesTable};

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// A half-integer or integer angular-momentum value stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(pub i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(v: i32) -> Self {
        HalfInt(2 * v)
    }

    /// Rejects values that are not multiples of ½.
    pub fn from_f64(v: f64) -> Result<Self> {
        let twice = 2.0 * v;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::domain("atomic", format!("{v} is not a half-integer")));
        }
        Ok(HalfInt(twice.round() as i32))
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Fine-structure state |n, l, s = 1/2, j, m_j⟩ of the valence electron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElectronicState {
    pub n: u32,
    pub l: u32,
    pub j: HalfInt,
    pub mj: HalfInt,
}

impl ElectronicState {
    pub fn new(n: u32, l: u32, j: HalfInt, mj: HalfInt) -> Result<Self> {
        let s = Self { n, l, j, mj };
        s.validate()?;
        Ok(s)
    }

    /// Same as [`ElectronicState::new`] with j and m_j given as twice their value.
    pub fn from_twice(n: u32, l: u32, j2: i32, mj2: i32) -> Result<Self> {
        Self::new(n, l, HalfInt(j2), HalfInt(mj2))
    }

    pub fn validate(&self) -> Result<()> {
        let l2 = 2 * self.l as i32;
        if self.n < 1 || self.l >= self.n {
            return Err(Error::domain("atomic", format!("invalid n = {}, l = {}", self.n, self.l)));
        }
        if self.j.is_integer() || self.j.0 < (l2 - 1).abs() || self.j.0 > l2 + 1 {
            return Err(Error::domain("atomic", format!("j = {} incompatible with l = {}", self.j, self.l)));
        }
        if self.mj.is_integer() || self.mj.0.abs() > self.j.0 {
            return Err(Error::domain("atomic", format!("|m_j| = {} exceeds j = {}", self.mj, self.j)));
        }
        Ok(())
    }

    pub fn angular(&self) -> AngularState {
        AngularState { l: self.l, j: self.j, mj: self.mj }
    }

    /// Spectroscopic label such as `46P1/2(+1/2)`.
    pub fn label(&self) -> String {
        const L: [char; 7] = ['S', 'P', 'D', 'F', 'G', 'H', 'I'];
        let lc = L.get(self.l as usize).copied().unwrap_or('?');
        let sign = if self.mj.0 >= 0 { "+" } else { "" };
        format!("{}{}{}({}{})", self.n, lc, self.j, sign, self.mj)
    }
}

/// The five Sr⁺ states spanning the gate level scheme, for Rydberg level `n`.
///
/// Order: `|0⟩ = 5S1/2(−1/2)`, `|1⟩ = 4D5/2(−5/2)`, `|2⟩ = 6P3/2(−3/2)`,
/// `|3⟩ = nS1/2(−1/2)`, `|4⟩ = nP1/2(+1/2)`.
pub fn gate_level_scheme(n: u32) -> [ElectronicState; 5] {
    [
        ElectronicState { n: 5, l: 0, j: HalfInt(1), mj: HalfInt(-1) },
        ElectronicState { n: 4, l: 2, j: HalfInt(5), mj: HalfInt(-5) },
        ElectronicState { n: 6, l: 1, j: HalfInt(3), mj: HalfInt(-3) },
        ElectronicState { n, l: 0, j: HalfInt(1), mj: HalfInt(-1) },
        ElectronicState { n, l: 1, j: HalfInt(1), mj: HalfInt(1) },
    ]
}
