// SPDX-License-Identifier: Apache-2.0

//! Laser Rabi frequency Ω_L(t) and detuning Δ_L(t) of the three gate
//! protocols. Shapes are stored in user units (2π×MHz, µs); evaluation
//! returns rad/µs.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Drive;
use crate::units::{angular_to_mhz, mhz_to_angular};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    A,
    B,
    C,
}

impl Protocol {
    /// Number of free pulse parameters.
    pub fn dim(self) -> usize {
        match self {
            Protocol::A => 2,
            Protocol::B => 3,
            Protocol::C => 0,
        }
    }
}

impl std::str::FromStr for Protocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Protocol::A),
            "B" => Ok(Protocol::B),
            "C" => Ok(Protocol::C),
            other => Err(Error::Config(format!("unknown protocol {other:?}"))),
        }
    }
}

/// Pulse of one of the three protocols.
///
/// * A: Ω_L = Ω₀ sin²(πt/τ), Δ_L = δ₀.
/// * B: as A with Δ_L = δ₀ − Δ₀ sin²(πt/τ).
/// * C: π-2π-π sequence with single-ion addressing; Ω₀ = 8√2π/τ and
///   Δ_L = Ω_MW/2 are fixed by the gate, so there is nothing to set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", deny_unknown_fields)]
pub enum PulseShape {
    A { omega_0: f64, delta_0: f64, tau: f64 },
    B { omega_0: f64, delta_0: f64, big_delta_0: f64, tau: f64 },
    C { tau: f64, omega_mw: f64 },
}

impl PulseShape {
    /// Builds a shape from a parameter vector in 2π×MHz: `[Ω₀, δ₀]` for A,
    /// `[Ω₀, δ₀, Δ₀]` for B and `[]` for C.
    pub fn from_params(protocol: Protocol, params: &[f64], tau: f64, omega_mw_mhz: f64) -> Result<Self> {
        if params.len() != protocol.dim() {
            return Err(Error::domain(
                "pulses",
                format!("protocol {protocol:?} takes {} parameters, got {}", protocol.dim(), params.len()),
            ));
        }
        let s = match protocol {
            Protocol::A => PulseShape::A { omega_0: params[0], delta_0: params[1], tau },
            Protocol::B => PulseShape::B { omega_0: params[0], delta_0: params[1], big_delta_0: params[2], tau },
            Protocol::C => PulseShape::C { tau, omega_mw: omega_mw_mhz },
        };
        s.validate()?;
        Ok(s)
    }

    pub fn protocol(&self) -> Protocol {
        match self {
            PulseShape::A { .. } => Protocol::A,
            PulseShape::B { .. } => Protocol::B,
            PulseShape::C { .. } => Protocol::C,
        }
    }

    pub fn tau(&self) -> f64 {
        match *self {
            PulseShape::A { tau, .. } | PulseShape::B { tau, .. } | PulseShape::C { tau, .. } => tau,
        }
    }

    /// Free parameters in 2π×MHz, the inverse of [`PulseShape::from_params`].
    pub fn params(&self) -> Vec<f64> {
        match *self {
            PulseShape::A { omega_0, delta_0, .. } => vec![omega_0, delta_0],
            PulseShape::B { omega_0, delta_0, big_delta_0, .. } => vec![omega_0, delta_0, big_delta_0],
            PulseShape::C { .. } => vec![],
        }
    }

    /// Peak Rabi frequency in 2π×MHz; derived for protocol C.
    pub fn omega_0(&self) -> f64 {
        match *self {
            PulseShape::A { omega_0, .. } | PulseShape::B { omega_0, .. } => omega_0,
            PulseShape::C { tau, .. } => protocol_c_omega_0(tau),
        }
    }

    /// Static detuning δ₀ in 2π×MHz; Ω_MW/2 for protocol C.
    pub fn delta_0(&self) -> f64 {
        match *self {
            PulseShape::A { delta_0, .. } | PulseShape::B { delta_0, .. } => delta_0,
            PulseShape::C { omega_mw, .. } => 0.5 * omega_mw,
        }
    }

    /// Drives globally (A and B), i.e. both ions see the same field.
    pub fn is_global(&self) -> bool {
        !matches!(self, PulseShape::C { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let tau = self.tau();
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::domain("pulses", format!("τ must be positive, got {tau}")));
        }
        let finite = self.params().iter().all(|x| x.is_finite());
        match *self {
            PulseShape::A { omega_0, .. } | PulseShape::B { omega_0, .. } if !(omega_0 >= 0.0) || !finite => {
                Err(Error::domain("pulses", format!("Ω₀ must be finite and non-negative, got {omega_0}")))
            }
            PulseShape::C { omega_mw, .. } if !(omega_mw > 0.0 && omega_mw.is_finite()) => {
                Err(Error::domain("pulses", format!("Ω_MW must be positive, got {omega_mw}")))
            }
            _ => Ok(()),
        }
    }

    /// Drive on ion 1 and ion 2 at time t (µs), in rad/µs.
    pub fn drives(&self, t: f64) -> [Drive; 2] {
        match self {
            PulseShape::A { .. } => {
                let d = pulse_a(self, t);
                [d, d]
            }
            PulseShape::B { .. } => {
                let d = pulse_b(self, t);
                [d, d]
            }
            PulseShape::C { .. } => [pulse_c(self, t, 1), pulse_c(self, t, 2)],
        }
    }
}

/// Protocol C amplitude 8√2π/τ expressed in 2π×MHz (τ in µs).
pub fn protocol_c_omega_0(tau: f64) -> f64 {
    angular_to_mhz(8.0 * std::f64::consts::SQRT_2 * PI / tau)
}

fn sin2(x: f64) -> f64 {
    let s = x.sin();
    s * s
}

/// Protocol A drive. Shapes of other protocols are read through their A part.
pub fn pulse_a(shape: &PulseShape, t: f64) -> Drive {
    let tau = shape.tau();
    Drive { rabi: mhz_to_angular(shape.omega_0()) * sin2(PI * t / tau), detuning: mhz_to_angular(shape.delta_0()) }
}

/// Protocol B drive; reduces to [`pulse_a`] for Δ₀ = 0 or non-B shapes.
pub fn pulse_b(shape: &PulseShape, t: f64) -> Drive {
    let mut d = pulse_a(shape, t);
    if let PulseShape::B { big_delta_0, tau, .. } = *shape {
        d.detuning -= mhz_to_angular(big_delta_0) * sin2(PI * t / tau);
    }
    d
}

/// Protocol C drive on `ion` (1 or 2). Ion 1 is driven on [0, τ/4] and
/// [3τ/4, τ], ion 2 on (τ/4, 3τ/4). Other ion indices get no drive.
pub fn pulse_c(shape: &PulseShape, t: f64, ion: usize) -> Drive {
    let tau = shape.tau();
    let omega_0 = mhz_to_angular(shape.omega_0());
    let detuning = mhz_to_angular(shape.delta_0());
    let outer = t <= 0.25 * tau || t >= 0.75 * tau;
    let rabi = match ion {
        1 if outer => omega_0 * sin2(4.0 * PI * t / tau),
        2 if !outer => omega_0 * (2.0 * PI * t / tau).cos().powi(2),
        _ => 0.0,
    };
    Drive { rabi, detuning }
}

/// Writes `points` equally spaced samples of the drive as CSV in 2π×MHz.
pub fn write_pulse_csv<W: Write>(shape: &PulseShape, points: usize, mut w: W) -> Result<()> {
    if points < 2 {
        return Err(Error::domain("pulses", "need at least two samples"));
    }
    writeln!(w, "# rydgate pulse v1: protocol={:?} tau_us={}", shape.protocol(), shape.tau())?;
    writeln!(w, "t_us,omega_l1_mhz,delta_l1_mhz,omega_l2_mhz,delta_l2_mhz")?;
    let tau = shape.tau();
    for k in 0..points {
        let t = tau * k as f64 / (points - 1) as f64;
        let [d1, d2] = shape.drives(t);
        writeln!(
            w,
            "{t:.9},{:.9},{:.9},{:.9},{:.9}",
            angular_to_mhz(d1.rabi),
            angular_to_mhz(d1.detuning),
            angular_to_mhz(d2.rabi),
            angular_to_mhz(d2.detuning)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_c_rejects_explicit_amplitude() {
        let ok: PulseShape = toml::from_str("protocol = \"C\"\ntau = 1.0\nomega_mw = 100.0\n").unwrap();
        assert_eq!(ok.protocol(), Protocol::C);
        let bad = toml::from_str::<PulseShape>("protocol = \"C\"\ntau = 1.0\nomega_mw = 100.0\nomega_0 = 5.0\n");
        assert!(bad.is_err());
    }

    #[test]
    fn parameter_round_trip() {
        let s = PulseShape::from_params(Protocol::B, &[9.8, 37.44, -12.1], 1.0, 100.0).unwrap();
        assert_eq!(s.params(), vec![9.8, 37.44, -12.1]);
        assert!(PulseShape::from_params(Protocol::A, &[1.0], 1.0, 100.0).is_err());
        assert!(PulseShape::from_params(Protocol::A, &[-1.0, 2.0], 1.0, 100.0).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = PulseShape::C { tau: 1.0, omega_mw: 100.0 };
        let mut buf = Vec::new();
        write_pulse_csv(&s, 5, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text.starts_with("# rydgate pulse v1"));
    }
}
