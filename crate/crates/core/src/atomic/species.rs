// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::ATOMIC_MASS_UNIT;

const BUILTIN_TABLE: &str = include_str!("../../data/species.toml");

/// Model-potential parameters for one orbital angular momentum channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channel {
    pub l: u32,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub rc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IonSpecies {
    pub name: String,
    pub isotope: u32,
    /// Nuclear charge number.
    pub z: u32,
    /// Charge number of the screened ionic core.
    pub core_charge: u32,
    /// Static dipole polarizability of the core (a₀³).
    pub alpha_d: f64,
    pub mass_amu: f64,
    /// s, p, d, f channels in that order.
    pub channels: Vec<Channel>,
}

impl IonSpecies {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::domain("atomic", format!("{}: {msg}", self.name)));
        if self.channels.len() != 4 {
            return bad(format!("expected 4 channels (s, p, d, f), found {}", self.channels.len()));
        }
        for (l, ch) in self.channels.iter().enumerate() {
            if ch.l as usize != l {
                return bad(format!("channel {l} labelled l = {}", ch.l));
            }
            if !(ch.k1 > 0.0 && ch.k2 > 0.0 && ch.k3 > 0.0 && ch.rc > 0.0) {
                return bad(format!("non-positive fitting parameter in channel l = {l}"));
            }
        }
        if !(self.alpha_d > 0.0 && self.mass_amu > 0.0) || self.core_charge == 0 || self.z <= self.core_charge {
            return bad("non-physical charge, polarizability or mass".into());
        }
        Ok(())
    }

    /// Channel parameters for orbital angular momentum `l`; l ≥ 4 reuses f.
    pub fn channel(&self, l: u32) -> &Channel {
        &self.channels[(l as usize).min(3)]
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass_amu * ATOMIC_MASS_UNIT
    }

    pub fn strontium() -> Self {
        SpeciesTable::builtin().get("Sr+").expect("Sr+ is in the builtin table").clone()
    }
}

/// Species table in the same layout as the shipped `data/species.toml`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesTable {
    pub species: Vec<IonSpecies>,
}

impl SpeciesTable {
    pub fn parse(text: &str) -> Result<Self> {
        let table: SpeciesTable =
            toml::from_str(text).map_err(|e| Error::Config(format!("species table: {e}")))?;
        for s in &table.species {
            s.validate()?;
        }
        Ok(table)
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_TABLE).expect("builtin species table is valid")
    }

    /// Lookup by name, accepting `Sr+`, `Sr`, `88Sr+` or `sr`.
    pub fn get(&self, name: &str) -> Option<&IonSpecies> {
        let key: String = name
            .trim()
            .trim_start_matches(|c: char| c.is_ascii_digit())
            .trim_end_matches('+')
            .to_ascii_lowercase();
        self.species
            .iter()
            .find(|s| s.name.trim_end_matches('+').to_ascii_lowercase() == key)
    }
}
