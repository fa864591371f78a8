// SPDX-License-Identifier: Apache-2.0

//! Bell-state fidelities, population and phase errors, and the
//! decay-integral fidelity estimate.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{entangling_phase, Trajectory};
use crate::error::{Error, Result};
use crate::model::{StateBasis, DIM};

/// Target (|00⟩ + |01⟩ + |10⟩ − |11⟩)/2 in computational order.
pub const BELL_TARGET: [f64; 4] = [0.5, 0.5, 0.5, -0.5];

/// Amplitudes of |00⟩, |01⟩, |10⟩, |11⟩ from a 16-component state, or the
/// state itself when it already has four components.
pub fn computational_amplitudes(psi: &[C64]) -> Result<[C64; 4]> {
    match psi.len() {
        4 => Ok([psi[0], psi[1], psi[2], psi[3]]),
        DIM => Ok(StateBasis::COMPUTATIONAL.map(|i| psi[i])),
        n => Err(Error::domain("gatemetrics", format!("expected 4 or {DIM} amplitudes, got {n}"))),
    }
}

fn overlap_sq(c: &[C64; 4]) -> f64 {
    let s: C64 = c.iter().zip(BELL_TARGET).map(|(a, t)| a * t).sum();
    s.norm_sqr()
}

/// |⟨Ψ_B|ψ⟩|² without renormalization.
pub fn bell_fidelity(psi: &[C64]) -> Result<f64> {
    Ok(overlap_sq(&computational_amplitudes(psi)?))
}

/// Fidelity after the compensating rotations e^{−iφ₁₀} on ion 1 and
/// e^{−iφ₀₁} on ion 2.
pub fn bell_fidelity_sqr(psi: &[C64], phi10: f64, phi01: f64) -> Result<f64> {
    let mut c = computational_amplitudes(psi)?;
    c[1] *= C64::from_polar(1.0, -phi01);
    c[2] *= C64::from_polar(1.0, -phi10);
    c[3] *= C64::from_polar(1.0, -(phi10 + phi01));
    Ok(overlap_sq(&c))
}

/// Population error p̄* = 1 − ¼(Σ|c_ab|)² and phase error
/// φ̄* = 1 − |3 − e^{iφ*}|²/16.
pub fn error_measures(magnitudes: [f64; 4], phi_star: f64) -> (f64, f64) {
    let s: f64 = magnitudes.iter().sum();
    let p = 1.0 - 0.25 * s * s;
    let q = (C64::new(3.0, 0.0) - C64::from_polar(1.0, phi_star)).norm_sqr();
    (p.max(0.0), (1.0 - q / 16.0).max(0.0))
}

/// All figures of merit of a final state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOutcome {
    /// |c_ab| for 00, 01, 10, 11.
    pub magnitudes: [f64; 4],
    /// arg c_ab for 00, 01, 10, 11.
    pub phases: [f64; 4],
    pub fidelity_plain: f64,
    pub fidelity_sqr: f64,
    pub population_error: f64,
    pub phase_error: f64,
    pub entangling_phase: f64,
}

impl GateOutcome {
    pub fn from_state(psi: &[C64]) -> Result<Self> {
        let c = computational_amplitudes(psi)?;
        let magnitudes = c.map(|a| a.norm());
        let phases = c.map(|a| a.arg());
        let phi_star = entangling_phase(phases[3], phases[2], phases[1]);
        let (population_error, phase_error) = error_measures(magnitudes, phi_star);
        Ok(Self {
            magnitudes,
            phases,
            fidelity_plain: overlap_sq(&c),
            fidelity_sqr: bell_fidelity_sqr(psi, phases[2], phases[1])?,
            population_error,
            phase_error,
            entangling_phase: phi_star,
        })
    }
}

/// |1 − (γ_R/2) ∫ Σᵢ pᵢ(t) dt|² from a decay-free trajectory, pᵢ being the
/// Rydberg population of ion i. Trapezoidal rule on the trajectory samples.
pub fn decay_fidelity_estimate(traj: &Trajectory, decay_rate: f64) -> Result<f64> {
    if traj.times.len() < 2 {
        return Err(Error::domain("gatemetrics", "decay estimate needs a sampled trajectory"));
    }
    if decay_rate == 0.0 {
        return Ok(1.0);
    }
    let p1 = traj.rydberg_population(0);
    let p2 = traj.rydberg_population(1);
    let mut integral = 0.0;
    for k in 1..traj.times.len() {
        let dt = traj.times[k] - traj.times[k - 1];
        integral += 0.5 * dt * (p1[k] + p2[k] + p1[k - 1] + p2[k - 1]);
    }
    Ok((1.0 - 0.5 * decay_rate * integral).powi(2))
}
