// SPDX-License-Identifier: Apache-2.0

//! Run configuration shared by the command-line front end.
//!
//! A configuration is a TOML document with the sections below; every section
//! is optional and unknown keys are rejected. Run summaries embed the fully
//! resolved configuration under a `config` key, so a summary JSON file can be
//! loaded back with [`RunConfig::load`] to repeat the run.
//!
//! ```toml
//! command = "simulate"
//!
//! [gate]
//! regime = "conservative"   # or give v, omega_mw, tau explicitly
//! tau = 1.0
//!
//! [pulse]
//! protocol = "B"
//! omega_0 = 9.80
//! delta_0 = 37.44
//! big_delta_0 = -12.10
//! tau = 1.0
//!
//! [decay]
//! lifetime = 7.8
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::atomic::GridConfig;
use crate::error::{Error, Result};
use crate::optimize::{DeConfig, ObjectiveKind, Regime, RegimeKind, OBJECTIVE_TOL};
use crate::pulses::{Protocol, PulseShape};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default)]
    pub gate: GateSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<Protocol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseShape>,
    #[serde(default)]
    pub decay: DecaySection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub optimizer: OptimizerSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub atomic: AtomicSection,
    #[serde(default)]
    pub crystal: CrystalSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Fixed gate parameters in 2π×MHz and µs. Explicit values override the
/// regime preset.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_mw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_0_bounds: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_0_bounds: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_delta_0_bounds: Option<(f64, f64)>,
}

/// Rydberg decay. Give either a rate in µs⁻¹ or a lifetime in µs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecaySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifetime: Option<f64>,
}

impl DecaySection {
    pub fn rate(&self) -> Result<f64> {
        match (self.rate, self.lifetime) {
            (Some(_), Some(_)) => Err(Error::Config("decay: give either rate or lifetime, not both".into())),
            (Some(r), None) if r.is_finite() && r >= 0.0 => Ok(r),
            (None, Some(l)) if l.is_finite() && l > 0.0 => Ok(1.0 / l),
            (None, None) => Ok(0.0),
            _ => Err(Error::Config("decay: rate must be ≥ 0 and lifetime > 0".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_samples() -> usize {
    1000
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self { tol: default_tol(), samples: default_samples() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    #[serde(default = "default_kind")]
    pub kind: ObjectiveKind,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub de: DeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<Vec<f64>>,
    /// Integrator tolerance of objective evaluations.
    #[serde(default = "default_objective_tol")]
    pub tol: f64,
}

fn default_objective_tol() -> f64 {
    OBJECTIVE_TOL
}

fn default_kind() -> ObjectiveKind {
    ObjectiveKind::Sqr
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3]
}

impl Default for OptimizerSection {
    fn default() -> Self {
        Self { kind: default_kind(), seeds: default_seeds(), de: DeConfig::default(), warm_start: None, tol: OBJECTIVE_TOL }
    }
}

/// Gate times for `sweep-decay`, in µs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub taus: Vec<f64>,
}

/// Valence-electron states for `solve-radial` and `matrix-element`.
/// `j` values are given as decimals (0.5, 1.5, ...).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomicSection {
    #[serde(default = "default_species")]
    pub species: String,
    #[serde(default)]
    pub hydrogenic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l2: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j2: Option<f64>,
    #[serde(default = "default_rank")]
    pub k: u32,
    #[serde(default)]
    pub grid: GridConfig,
}

fn default_species() -> String {
    "Sr+".into()
}

fn default_rank() -> u32 {
    1
}

impl Default for AtomicSection {
    fn default() -> Self {
        Self {
            species: default_species(),
            hydrogenic: false,
            n: None,
            l: None,
            j: None,
            n2: None,
            l2: None,
            j2: None,
            k: default_rank(),
            grid: GridConfig::default(),
        }
    }
}

/// Trap for `crystal`: either an anisotropy `gamma` with an axial frequency
/// `omega` (2π×MHz), or nothing beyond `n` for dimensionless output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    #[serde(default = "default_ions")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Also fit the gap scaling over `scaling_range`.
    #[serde(default)]
    pub scaling: bool,
    #[serde(default = "default_scaling_range")]
    pub scaling_range: (usize, usize),
}

fn default_ions() -> usize {
    2
}

fn default_scaling_range() -> (usize, usize) {
    (2, 120)
}

impl Default for CrystalSection {
    fn default() -> Self {
        Self { n: default_ions(), gamma: None, omega: None, scaling: false, scaling_range: default_scaling_range() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Directory for CSV/JSON artifacts. Defaults to the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Newline-delimited JSON log that optimizer results are appended to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses either a bare configuration object or a run summary carrying one
    /// under `config`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        let inner = match value {
            serde_json::Value::Object(mut map) if map.contains_key("config") => map.remove("config").unwrap_or_default(),
            other => other,
        };
        serde_json::from_value(inner).map_err(|e| Error::Config(e.to_string()))
    }

    /// Loads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Regime preset overlaid with explicit gate values.
    pub fn regime(&self) -> Result<Regime> {
        let g = &self.gate;
        let mut regime = match g.regime {
            Some(RegimeKind::Custom) | None => {
                let (Some(v), Some(omega_mw), Some(tau)) = (g.v, g.omega_mw, g.tau) else {
                    return Err(Error::Config("gate: give a regime or all of v, omega_mw and tau".into()));
                };
                let mut r = Regime::conservative();
                r.kind = RegimeKind::Custom;
                r.v = v;
                r.omega_mw = omega_mw;
                r.tau = tau;
                r.delta_0 = (0.0, omega_mw);
                r.big_delta_0 = (-omega_mw, omega_mw);
                r
            }
            Some(kind) => Regime::preset(kind)?,
        };
        if let Some(v) = g.v {
            regime.v = v;
        }
        if let Some(w) = g.omega_mw {
            regime.omega_mw = w;
        }
        if let Some(t) = g.tau {
            regime.tau = t;
        }
        if let Some(b) = g.omega_0_bounds {
            regime.omega_0 = b;
        }
        if let Some(b) = g.delta_0_bounds {
            regime.delta_0 = b;
        }
        if let Some(b) = g.big_delta_0_bounds {
            regime.big_delta_0 = b;
        }
        regime.validate()?;
        Ok(regime)
    }

    /// The protocol named by `protocol` or implied by `pulse`.
    pub fn protocol(&self) -> Result<Protocol> {
        match (self.protocol, &self.pulse) {
            (Some(p), Some(s)) if p != s.protocol() => {
                Err(Error::Config(format!("protocol {p:?} conflicts with pulse protocol {:?}", s.protocol())))
            }
            (Some(p), _) => Ok(p),
            (None, Some(s)) => Ok(s.protocol()),
            (None, None) => Err(Error::Config("no protocol given".into())),
        }
    }

    /// Checks everything that can be checked without knowing the command.
    pub fn validate(&self) -> Result<()> {
        self.decay.rate()?;
        if !(self.integrator.tol > 0.0 && self.integrator.tol < 1.0) {
            return Err(Error::Config("integrator.tol must lie in (0, 1)".into()));
        }
        if !(self.optimizer.tol > 0.0 && self.optimizer.tol < 1.0) {
            return Err(Error::Config("optimizer.tol must lie in (0, 1)".into()));
        }
        if self.optimizer.seeds.is_empty() {
            return Err(Error::Config("optimizer.seeds must not be empty".into()));
        }
        if self.gate.regime.is_some() || self.gate.v.is_some() {
            self.regime()?;
        }
        if let Some(p) = &self.pulse {
            p.validate()?;
            if let Some(tau) = self.gate.tau {
                if (tau - p.tau()).abs() > 1e-12 * tau.abs().max(1.0) {
                    return Err(Error::Config(format!("pulse.tau {} differs from gate.tau {tau}", p.tau())));
                }
            }
        }
        if self.protocol.is_some() || self.pulse.is_some() {
            self.protocol()?;
        }
        if self.sweep.taus.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Config("sweep.taus must be positive".into()));
        }
        let (lo, hi) = self.crystal.scaling_range;
        if lo < 2 || hi <= lo {
            return Err(Error::Config("crystal.scaling_range needs 2 ≤ lo < hi".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_with_overrides() {
        let cfg = RunConfig::from_toml_str(
            "[gate]\nregime = \"optimistic\"\ntau = 0.2\n[decay]\nlifetime = 7.8\n",
        )
        .unwrap();
        let r = cfg.regime().unwrap();
        assert_eq!(r.v, 25.0);
        assert_eq!(r.tau, 0.2);
        assert!((cfg.decay.rate().unwrap() - 1.0 / 7.8).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml_str("[gate]\nregim = \"optimistic\"\n").is_err());
        assert!(RunConfig::from_toml_str("bogus = 1\n").is_err());
    }

    #[test]
    fn explicit_gate_needs_all_values() {
        let cfg = RunConfig::from_toml_str("[gate]\nv = 10.0\ntau = 1.0\n").unwrap();
        assert!(cfg.regime().is_err());
    }

    #[test]
    fn toml_and_json_round_trip() {
        let cfg = RunConfig::from_toml_str(
            "command = \"simulate\"\n[gate]\nregime = \"conservative\"\n[pulse]\nprotocol = \"B\"\nomega_0 = 9.8\ndelta_0 = 37.44\nbig_delta_0 = -12.1\ntau = 1.0\n",
        )
        .unwrap();
        cfg.validate().unwrap();
        let again = RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, again);
        let summary = serde_json::json!({ "config": cfg, "result": { "fidelity": 1.0 } });
        assert_eq!(RunConfig::from_json_str(&summary.to_string()).unwrap(), cfg);
    }
}
