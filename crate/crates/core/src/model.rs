// SPDX-License-Identifier: Apache-2.0

//! Two-ion dressed-state Hamiltonians.
//!
//! Each ion carries the levels |0⟩, |1⟩ (qubit) and the microwave-dressed
//! Rydberg states |−⟩, |+⟩, stored in that order. The two-ion product state
//! |a b⟩ has index `4a + b`, ion 1 being the left factor. Hamiltonians are in
//! rad/µs with ħ = 1.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, Matrix2, Matrix3, SMatrix};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::mhz_to_angular;

pub const SINGLE_DIM: usize = 4;
pub const DIM: usize = 16;

/// Single-ion level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    Zero = 0,
    One = 1,
    Minus = 2,
    Plus = 3,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::Zero, Level::One, Level::Minus, Level::Plus];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_rydberg(self) -> bool {
        matches!(self, Level::Minus | Level::Plus)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Level::Zero => "0",
            Level::One => "1",
            Level::Minus => "-",
            Level::Plus => "+",
        }
    }
}

/// Index bookkeeping for the 16-dimensional two-ion space.
pub struct StateBasis;

impl StateBasis {
    /// Computational states |00⟩, |01⟩, |10⟩, |11⟩ in that order.
    pub const COMPUTATIONAL: [usize; 4] = [0, 1, 4, 5];

    pub fn index(a: Level, b: Level) -> usize {
        SINGLE_DIM * a.index() + b.index()
    }

    pub fn levels(index: usize) -> (Level, Level) {
        (Level::ALL[index / SINGLE_DIM], Level::ALL[index % SINGLE_DIM])
    }

    pub fn label(index: usize) -> String {
        let (a, b) = Self::levels(index);
        format!("{}{}", a.symbol(), b.symbol())
    }

    /// Number of ions in a Rydberg level.
    pub fn rydberg_count(index: usize) -> usize {
        let (a, b) = Self::levels(index);
        usize::from(a.is_rydberg()) + usize::from(b.is_rydberg())
    }

    /// (|00⟩ + |01⟩ + |10⟩ + |11⟩)/2.
    pub fn initial_state() -> Vec<C64> {
        let mut psi = vec![C64::new(0.0, 0.0); DIM];
        for i in Self::COMPUTATIONAL {
            psi[i] = C64::new(0.5, 0.0);
        }
        psi
    }

    /// Orthonormal vectors of the symmetric sector
    /// B₁₁ = {|++⟩, |S_R⟩, |S₊⟩, |−−⟩, |S₋⟩, |11⟩}.
    pub fn symmetric_b11() -> [[f64; DIM]; 6] {
        use Level::*;
        let h = 1.0 / SQRT_2;
        let mut v = [[0.0; DIM]; 6];
        v[0][Self::index(Plus, Plus)] = 1.0;
        v[1][Self::index(Plus, Minus)] = h;
        v[1][Self::index(Minus, Plus)] = h;
        v[2][Self::index(Plus, One)] = h;
        v[2][Self::index(One, Plus)] = h;
        v[3][Self::index(Minus, Minus)] = 1.0;
        v[4][Self::index(Minus, One)] = h;
        v[4][Self::index(One, Minus)] = h;
        v[5][Self::index(One, One)] = 1.0;
        v
    }

    /// Antisymmetric partners {|A_R⟩, |A₊⟩, |A₋⟩}.
    pub fn antisymmetric() -> [[f64; DIM]; 3] {
        use Level::*;
        let h = 1.0 / SQRT_2;
        let mut v = [[0.0; DIM]; 3];
        v[0][Self::index(Plus, Minus)] = h;
        v[0][Self::index(Minus, Plus)] = -h;
        v[1][Self::index(Plus, One)] = h;
        v[1][Self::index(One, Plus)] = -h;
        v[2][Self::index(Minus, One)] = h;
        v[2][Self::index(One, Minus)] = -h;
        v
    }
}

/// Fixed physical parameters of a gate, in rad/µs and µs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    /// Dipole-dipole interaction V.
    pub v: f64,
    /// Microwave Rabi frequency Ω_MW.
    pub omega_mw: f64,
    /// Gate duration τ (µs).
    pub tau: f64,
    /// Rydberg decay rate γ_R (1/µs).
    pub decay_rate: f64,
}

impl GateParams {
    /// From user units: V and Ω_MW in 2π×MHz, τ in µs, γ_R in 1/µs.
    pub fn from_mhz(v_mhz: f64, omega_mw_mhz: f64, tau: f64, decay_rate: f64) -> Result<Self> {
        let p = Self { v: mhz_to_angular(v_mhz), omega_mw: mhz_to_angular(omega_mw_mhz), tau, decay_rate };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0 && self.omega_mw > 0.0 && self.tau > 0.0 && self.decay_rate >= 0.0)
            || !(self.v.is_finite() && self.omega_mw.is_finite() && self.tau.is_finite() && self.decay_rate.is_finite())
        {
            return Err(Error::domain("model", format!("invalid gate parameters {self:?}")));
        }
        Ok(())
    }

    pub fn with_decay(mut self, decay_rate: f64) -> Self {
        self.decay_rate = decay_rate;
        self
    }
}

/// Laser drive seen by one ion: Rabi frequency Ω_L and detuning Δ_L (rad/µs).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub rabi: f64,
    pub detuning: f64,
}

fn single_ion(drive: Drive, omega_mw: f64) -> SMatrix<f64, 4, 4> {
    let mut h = SMatrix::<f64, 4, 4>::zeros();
    h[(3, 3)] = drive.detuning + 0.5 * omega_mw;
    h[(2, 2)] = drive.detuning - 0.5 * omega_mw;
    let c = drive.rabi / (2.0 * SQRT_2);
    h[(1, 2)] = c;
    h[(2, 1)] = c;
    h[(1, 3)] = c;
    h[(3, 1)] = c;
    h
}

/// (V/2)[P⊗P − S⊗S] with P = |+⟩⟨+| − |−⟩⟨−| and S = |+⟩⟨−| − |−⟩⟨+|.
fn interaction(v: f64) -> SMatrix<f64, 16, 16> {
    let mut p = SMatrix::<f64, 4, 4>::zeros();
    p[(3, 3)] = 1.0;
    p[(2, 2)] = -1.0;
    let mut s = SMatrix::<f64, 4, 4>::zeros();
    s[(3, 2)] = 1.0;
    s[(2, 3)] = -1.0;
    (p.kronecker(&p) - s.kronecker(&s)) * (0.5 * v)
}

/// Two-ion Hamiltonian with independent drives on each ion; includes the
/// decay term when `params.decay_rate > 0`.
pub fn two_ion_hamiltonian_addressed(params: &GateParams, ion1: Drive, ion2: Drive) -> DMatrix<C64> {
    let id = SMatrix::<f64, 4, 4>::identity();
    let h = single_ion(ion1, params.omega_mw).kronecker(&id)
        + id.kronecker(&single_ion(ion2, params.omega_mw))
        + interaction(params.v);
    let h = DMatrix::from_fn(DIM, DIM, |i, j| C64::new(h[(i, j)], 0.0));
    add_decay(h, params.decay_rate)
}

/// Two-ion Hamiltonian for a global laser pulse (Ω_L, Δ_L in rad/µs).
pub fn two_ion_hamiltonian(params: &GateParams, omega_l: f64, delta_l: f64) -> DMatrix<C64> {
    let d = Drive { rabi: omega_l, detuning: delta_l };
    two_ion_hamiltonian_addressed(params, d, d)
}

/// Subtracts iγ_R/2 for each ion in a Rydberg level.
pub fn add_decay(mut h: DMatrix<C64>, decay_rate: f64) -> DMatrix<C64> {
    if decay_rate != 0.0 {
        for i in 0..DIM.min(h.nrows()) {
            h[(i, i)] -= C64::new(0.0, 0.5 * decay_rate * StateBasis::rydberg_count(i) as f64);
        }
    }
    h
}

/// Sparse decomposition H(t) = H₀ + Σᵢ [Δᵢ(t) Nᵢ + Ωᵢ(t) Xᵢ] used by the
/// integrator; Nᵢ projects ion i onto |±⟩ and Xᵢ holds the 1/(2√2)
/// couplings of ion i.
#[derive(Clone, Debug)]
pub struct HamiltonianTerms {
    /// Diagonal of H₀ (microwave splitting, interaction, decay).
    pub diag0: [C64; DIM],
    /// Off-diagonal entries of H₀ (interaction exchange terms).
    pub offdiag0: Vec<(usize, usize, f64)>,
    /// Rydberg projectors of ion 1 and ion 2 as index lists.
    pub rydberg: [Vec<usize>; 2],
    /// Laser couplings of ion 1 and ion 2 (row, col), weight 1/(2√2).
    pub coupling: [Vec<(usize, usize)>; 2],
}

impl HamiltonianTerms {
    pub fn new(params: &GateParams) -> Self {
        let h0 = two_ion_hamiltonian_addressed(params, Drive::default(), Drive::default());
        let mut diag0 = [C64::new(0.0, 0.0); DIM];
        let mut offdiag0 = Vec::new();
        for i in 0..DIM {
            diag0[i] = h0[(i, i)];
            for j in 0..DIM {
                if i != j && h0[(i, j)].norm() > 0.0 {
                    offdiag0.push((i, j, h0[(i, j)].re));
                }
            }
        }
        let mut rydberg = [Vec::new(), Vec::new()];
        let mut coupling = [Vec::new(), Vec::new()];
        for idx in 0..DIM {
            let (a, b) = StateBasis::levels(idx);
            if a.is_rydberg() {
                rydberg[0].push(idx);
            }
            if b.is_rydberg() {
                rydberg[1].push(idx);
            }
            // |1⟩ ↔ |±⟩ on either ion, both directions
            for (ion, lvl, other) in [(0, a, b), (1, b, a)] {
                let partner = |l: Level| if ion == 0 { StateBasis::index(l, other) } else { StateBasis::index(other, l) };
                match lvl {
                    Level::One => {
                        coupling[ion].push((idx, partner(Level::Minus)));
                        coupling[ion].push((idx, partner(Level::Plus)));
                    }
                    Level::Minus | Level::Plus => coupling[ion].push((idx, partner(Level::One))),
                    Level::Zero => {}
                }
            }
        }
        Self { diag0, offdiag0, rydberg, coupling }
    }

    /// out = −i H psi.
    pub fn apply_minus_i(&self, drives: [Drive; 2], psi: &[C64], out: &mut [C64]) {
        let mut hpsi = [C64::new(0.0, 0.0); DIM];
        for i in 0..DIM {
            hpsi[i] = self.diag0[i] * psi[i];
        }
        for &(i, j, v) in &self.offdiag0 {
            hpsi[i] += psi[j] * v;
        }
        for ion in 0..2 {
            let d = drives[ion];
            if d.detuning != 0.0 {
                for &i in &self.rydberg[ion] {
                    hpsi[i] += psi[i] * d.detuning;
                }
            }
            if d.rabi != 0.0 {
                let c = d.rabi / (2.0 * SQRT_2);
                for &(i, j) in &self.coupling[ion] {
                    hpsi[i] += psi[j] * c;
                }
            }
        }
        for i in 0..DIM {
            out[i] = C64::new(hpsi[i].im, -hpsi[i].re);
        }
    }
}

/// Dimensionless ratios ε± = Δ±/Δ_L, δ = Ω_L/Δ_L, η = V/Δ_L.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DressedRatios {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub delta: f64,
    pub eta: f64,
}

impl DressedRatios {
    /// Fails when Δ_L = 0, where the ratios are undefined.
    pub fn new(omega_l: f64, delta_l: f64, omega_mw: f64, v: f64) -> Result<Self> {
        if delta_l == 0.0 || !delta_l.is_finite() {
            return Err(Error::domain("model", "dimensionless ratios need Δ_L ≠ 0"));
        }
        Ok(Self {
            eps_plus: (delta_l + 0.5 * omega_mw) / delta_l,
            eps_minus: (delta_l - 0.5 * omega_mw) / delta_l,
            delta: omega_l / delta_l,
            eta: v / delta_l,
        })
    }
}

/// Symmetric-sector block H₁₁/Δ_L in the basis
/// {|++⟩, |S_R⟩, |S₊⟩, |−−⟩, |S₋⟩, |11⟩}.
pub fn h11_symmetric_block(eps_plus: f64, eps_minus: f64, delta: f64, eta: f64) -> SMatrix<f64, 6, 6> {
    let s = delta / SQRT_2;
    #[rustfmt::skip]
    let m = SMatrix::<f64, 6, 6>::from_row_slice(&[
        4.0 * eps_plus + eta, 0.0, delta, -eta, 0.0, 0.0,
        0.0, 2.0 * (eps_plus + eps_minus), s, 0.0, s, 0.0,
        delta, s, 2.0 * eps_plus, 0.0, 0.0, delta,
        -eta, 0.0, 0.0, 4.0 * eps_minus + eta, delta, 0.0,
        0.0, s, 0.0, delta, 2.0 * eps_minus, delta,
        0.0, 0.0, delta, 0.0, delta, 0.0,
    ]);
    m * 0.5
}

/// Adiabatically reduced H₁₁/Δ_L in the basis {|−−⟩, |S₋⟩, |11⟩}.
pub fn reduce_h11(eps_plus: f64, eps_minus: f64, delta: f64, eta: f64) -> Matrix3<f64> {
    #[rustfmt::skip]
    let m = Matrix3::new(
        4.0 * eps_minus + eta - eta * eta / (4.0 * eps_plus + eta), delta, 0.0,
        delta, 2.0 * eps_minus - delta * delta / (4.0 * (eps_plus + eps_minus)), delta,
        0.0, delta, -delta * delta / (2.0 * eps_plus),
    );
    m * 0.5
}

/// Adiabatically reduced H₁₀/Δ_L in the basis {|−0⟩, |10⟩}.
pub fn reduce_h10(eps_plus: f64, eps_minus: f64, delta: f64) -> Matrix2<f64> {
    let c = delta / (2.0 * SQRT_2);
    Matrix2::new(eps_minus, c, c, -delta * delta / (8.0 * eps_plus))
}

/// [`reduce_h11`] multiplied out by Δ_L, in rad/µs. Finite at Δ_L = 0.
pub fn reduced_h11_physical(drive: Drive, omega_mw: f64, v: f64) -> Matrix3<f64> {
    let (o, d) = (drive.rabi, drive.detuning);
    let dp = d + 0.5 * omega_mw;
    let dm = d - 0.5 * omega_mw;
    #[rustfmt::skip]
    let m = Matrix3::new(
        4.0 * dm + v - v * v / (4.0 * dp + v), o, 0.0,
        o, 2.0 * dm - o * o / (4.0 * (dp + dm)), o,
        0.0, o, -o * o / (2.0 * dp),
    );
    m * 0.5
}

/// [`reduce_h10`] multiplied out by Δ_L, in rad/µs.
pub fn reduced_h10_physical(drive: Drive, omega_mw: f64) -> Matrix2<f64> {
    let (o, d) = (drive.rabi, drive.detuning);
    let dp = d + 0.5 * omega_mw;
    let dm = d - 0.5 * omega_mw;
    let c = o / (2.0 * SQRT_2);
    Matrix2::new(dm, c, c, -o * o / (8.0 * dp))
}

/// Projects a full Hamiltonian onto the symmetric B₁₁ sector.
pub fn restrict_to_b11(h: &DMatrix<C64>) -> SMatrix<C64, 6, 6> {
    let basis = StateBasis::symmetric_b11();
    SMatrix::<C64, 6, 6>::from_fn(|a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..DIM {
            if basis[a][i] == 0.0 {
                continue;
            }
            for j in 0..DIM {
                if basis[b][j] != 0.0 {
                    acc += h[(i, j)] * basis[a][i] * basis[b][j];
                }
            }
        }
        acc
    })
}

/// JSON form of a complex matrix: `{"re": [[..]], "im": [[..]]}`.
pub fn matrix_to_json(h: &DMatrix<C64>) -> serde_json::Value {
    let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
        (0..h.nrows()).map(|i| (0..h.ncols()).map(|j| f(&h[(i, j)])).collect()).collect()
    };
    let labels: Vec<String> = (0..h.nrows().min(DIM)).map(StateBasis::label).collect();
    serde_json::json!({ "basis": labels, "re": rows(|c| c.re), "im": rows(|c| c.im) })
}
