// SPDX-License-Identifier: Apache-2.0

//! Time evolution of the two-ion state, phase bookkeeping and the adiabatic
//! estimate of the entangling phase.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Matrix2, Matrix3, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    reduced_h10_physical, reduced_h11_physical, two_ion_hamiltonian_addressed, GateParams, HamiltonianTerms, Level,
    StateBasis, DIM,
};
use crate::ode::{dop853, OdeOptions, OdeStats};
use crate::pulses::PulseShape;

/// Time-dependent Hamiltonian that can act on a state vector.
pub trait Hamiltonian: Sync {
    fn dim(&self) -> usize;
    /// out = −i H(t) ψ.
    fn apply_minus_i(&self, t: f64, psi: &[C64], out: &mut [C64]);
    /// Dense H(t).
    fn matrix(&self, t: f64) -> DMatrix<C64>;
}

/// A full two-ion gate: fixed parameters plus a pulse.
#[derive(Clone, Debug)]
pub struct GateModel {
    pub params: GateParams,
    pub pulse: PulseShape,
    terms: HamiltonianTerms,
}

impl GateModel {
    pub fn new(params: GateParams, pulse: PulseShape) -> Result<Self> {
        params.validate()?;
        pulse.validate()?;
        if (pulse.tau() - params.tau).abs() > 1e-12 * params.tau {
            return Err(Error::domain(
                "dynamics",
                format!("pulse duration {} differs from gate duration {}", pulse.tau(), params.tau),
            ));
        }
        Ok(Self { terms: HamiltonianTerms::new(&params), params, pulse })
    }

    pub fn tau(&self) -> f64 {
        self.params.tau
    }
}

impl Hamiltonian for GateModel {
    fn dim(&self) -> usize {
        DIM
    }

    fn apply_minus_i(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        self.terms.apply_minus_i(self.pulse.drives(t), psi, out);
    }

    fn matrix(&self, t: f64) -> DMatrix<C64> {
        let [d1, d2] = self.pulse.drives(t);
        two_ion_hamiltonian_addressed(&self.params, d1, d2)
    }
}

/// Hamiltonian given as a closure returning the dense matrix.
pub struct DenseHamiltonian<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64) -> DMatrix<C64> + Sync> DenseHamiltonian<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64) -> DMatrix<C64> + Sync> Hamiltonian for DenseHamiltonian<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_minus_i(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        let h = (self.f)(t);
        for i in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += h[(i, j)] * psi[j];
            }
            out[i] = C64::new(acc.im, -acc.re);
        }
    }

    fn matrix(&self, t: f64) -> DMatrix<C64> {
        (self.f)(t)
    }
}

pub const STEP_TOL_FACTOR: f64 = 1e-2;

/// Integration settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveOptions {
    /// Target error of the final state per unit time. The step controller
    /// runs [`STEP_TOL_FACTOR`] times tighter, since the global error of a
    /// gate evolution exceeds the local per-step bound by one to two orders.
    pub tol: f64,
    /// Number of equally spaced output samples including both ends; 0 keeps
    /// only the final state.
    pub samples: usize,
    /// Populations below this freeze the unwrapped phase.
    pub phase_floor: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { tol: 1e-10, samples: 1000, phase_floor: 1e-6 }
    }
}

impl EvolveOptions {
    pub fn final_only(tol: f64) -> Self {
        Self { tol, samples: 0, ..Self::default() }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    /// `populations[k][i] = |ψ_i(t_k)|²`.
    pub populations: Vec<Vec<f64>>,
    /// Unwrapped phases, same layout as `populations`.
    pub phases: Vec<Vec<f64>>,
    pub norm: Vec<f64>,
    /// State at exactly t = τ.
    pub final_state: Vec<C64>,
    pub stats: OdeStats,
}

impl Trajectory {
    /// Population of ion `ion` (0 or 1) in |−⟩ or |+⟩ at each sample.
    pub fn rydberg_population(&self, ion: usize) -> Vec<f64> {
        self.populations
            .iter()
            .map(|p| {
                (0..DIM.min(p.len()))
                    .filter(|&i| {
                        let (a, b) = StateBasis::levels(i);
                        if ion == 0 { a.is_rydberg() } else { b.is_rydberg() }
                    })
                    .map(|i| p[i])
                    .sum()
            })
            .collect()
    }

    /// Time series of a single component's population.
    pub fn population_of(&self, index: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[index]).collect()
    }

    /// φ* = [φ₁₁ − φ₁₀ − φ₀₁] mod 2π at each sample (two-ion trajectories only).
    pub fn entangling_phase_series(&self) -> Vec<f64> {
        let [_, i01, i10, i11] = StateBasis::COMPUTATIONAL;
        self.phases.iter().map(|ph| entangling_phase(ph[i11], ph[i10], ph[i01])).collect()
    }
}

/// Integrates i dψ/dt = H(t) ψ over [0, τ].
pub fn evolve<H: Hamiltonian + ?Sized>(h: &H, psi0: &[C64], tau: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    let n = h.dim();
    if psi0.len() != n {
        return Err(Error::domain("dynamics", format!("state has {} components, Hamiltonian {n}", psi0.len())));
    }
    let norm0: f64 = psi0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm0 - 1.0).abs() > 1e-10 {
        return Err(Error::domain("dynamics", format!("initial state norm {norm0} ≠ 1")));
    }
    if opts.samples == 1 {
        return Err(Error::domain("dynamics", "sample grid needs at least two points"));
    }
    let times: Vec<f64> = match opts.samples {
        0 => Vec::new(),
        m => (0..m).map(|k| tau * k as f64 / (m - 1) as f64).collect(),
    };
    let sol = dop853(|t, y, dy| h.apply_minus_i(t, y, dy), 0.0, tau, psi0, &times, &OdeOptions::with_tol(opts.tol * STEP_TOL_FACTOR))?;
    let mut states = sol.samples;
    if let Some(last) = states.last_mut() {
        last.clone_from(&sol.y_final);
    }
    let populations: Vec<Vec<f64>> = states.iter().map(|s| s.iter().map(|c| c.norm_sqr()).collect()).collect();
    let norm = populations.iter().map(|p| p.iter().sum::<f64>().sqrt()).collect();
    let phases = extract_phases(&states, opts.phase_floor);
    Ok(Trajectory { times, states, populations, phases, norm, final_state: sol.y_final, stats: sol.stats })
}

fn wrap_to_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y == -PI { PI } else { y }
}

/// Unwrapped arg c_i(t) by nearest-branch continuation, held at the last
/// valid value while |c_i|² < `phase_floor`.
pub fn extract_phases(states: &[Vec<C64>], phase_floor: f64) -> Vec<Vec<f64>> {
    let Some(first) = states.first() else { return Vec::new() };
    let n = first.len();
    let mut held = vec![0.0; n];
    let mut out = Vec::with_capacity(states.len());
    for s in states {
        for i in 0..n {
            if s[i].norm_sqr() >= phase_floor {
                let raw = s[i].arg();
                held[i] += wrap_to_pi(raw - held[i]);
            }
        }
        out.push(held.clone());
    }
    out
}

/// φ* = [φ₁₁ − φ₁₀ − φ₀₁] mod 2π in [0, 2π).
pub fn entangling_phase(phi11: f64, phi10: f64, phi01: f64) -> f64 {
    let p = (phi11 - phi10 - phi01).rem_euclid(TAU);
    if p >= TAU { 0.0 } else { p }
}

/// Indices of the states dynamically connected to computational state
/// `a b` (a, b ∈ {0, 1}).
fn sector(a: usize, b: usize) -> Vec<usize> {
    let reach = |q: usize| -> Vec<Level> {
        if q == 0 { vec![Level::Zero] } else { vec![Level::One, Level::Minus, Level::Plus] }
    };
    let mut idx = Vec::new();
    for la in reach(a) {
        for lb in reach(b) {
            idx.push(StateBasis::index(la, lb));
        }
    }
    idx
}

/// Instantaneous eigenenergies tracked from |11⟩, |10⟩ and |01⟩.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdiabaticEstimate {
    pub times: Vec<f64>,
    pub eps11: Vec<f64>,
    pub eps10: Vec<f64>,
    pub eps01: Vec<f64>,
    /// −∫(ε₁₁ − ε₁₀ − ε₀₁) dt mod 2π.
    pub entangling_phase: f64,
}

/// Adiabatic estimate of φ* from the instantaneous spectrum of a two-ion
/// gate sampled at `quadrature_points` (odd, ≥ 3) Simpson nodes.
pub fn adiabatic_phase_estimate<H: Hamiltonian + ?Sized>(
    h: &H,
    tau: f64,
    quadrature_points: usize,
) -> Result<AdiabaticEstimate> {
    if h.dim() != DIM {
        return Err(Error::domain("dynamics", "adiabatic estimate needs the two-ion Hamiltonian"));
    }
    if quadrature_points < 3 || quadrature_points % 2 == 0 {
        return Err(Error::domain("dynamics", "Simpson quadrature needs an odd number ≥ 3 of nodes"));
    }
    let times: Vec<f64> = (0..quadrature_points).map(|k| tau * k as f64 / (quadrature_points - 1) as f64).collect();
    let mut tracks = Vec::new();
    for (a, b) in [(1, 1), (1, 0), (0, 1)] {
        let idx = sector(a, b);
        let start = idx.iter().position(|&i| i == StateBasis::index(Level::ALL[a], Level::ALL[b])).unwrap_or(0);
        tracks.push(track_sector(h, &times, &idx, start)?);
    }
    let integrand: Vec<f64> = (0..times.len()).map(|k| tracks[0][k] - tracks[1][k] - tracks[2][k]).collect();
    let integral = simpson(&integrand, tau / (quadrature_points - 1) as f64);
    Ok(AdiabaticEstimate {
        entangling_phase: (-integral).rem_euclid(TAU),
        eps11: tracks.remove(0),
        eps10: tracks.remove(0),
        eps01: tracks.remove(0),
        times,
    })
}

fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len() - 1;
    let mut s = f[0] + f[n];
    for (k, v) in f.iter().enumerate().take(n).skip(1) {
        s += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

fn track_sector<H: Hamiltonian + ?Sized>(h: &H, times: &[f64], idx: &[usize], start: usize) -> Result<Vec<f64>> {
    let m = idx.len();
    let mut prev = nalgebra::DVector::<f64>::zeros(m);
    prev[start] = 1.0;
    let mut prev_energy: Option<f64> = None;
    let mut energies = Vec::with_capacity(times.len());
    for &t in times {
        let full = h.matrix(t);
        let block = DMatrix::from_fn(m, m, |i, j| 0.5 * (full[(idx[i], idx[j])].re + full[(idx[j], idx[i])].re));
        let eig = SymmetricEigen::new(block);
        let overlaps: Vec<f64> = (0..m).map(|c| eig.eigenvectors.column(c).dot(&prev).abs()).collect();
        let best = overlaps.iter().copied().fold(0.0, f64::max);
        if best < 0.5 {
            return Err(Error::Tracking { t, overlap: best });
        }
        // among near-equal overlaps prefer the eigenvalue closest to the last one
        let pick = (0..m)
            .filter(|&c| overlaps[c] > best - 1e-9)
            .min_by(|&x, &y| {
                let e = prev_energy.unwrap_or(0.0);
                (eig.eigenvalues[x] - e).abs().total_cmp(&(eig.eigenvalues[y] - e).abs())
            })
            .unwrap_or(0);
        let mut v = eig.eigenvectors.column(pick).into_owned();
        if v.dot(&prev) < 0.0 {
            v = -v;
        }
        prev = v;
        prev_energy = Some(eig.eigenvalues[pick]);
        energies.push(eig.eigenvalues[pick]);
    }
    Ok(energies)
}

/// Reduced sector after eliminating |+⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReducedSector {
    /// {|−−⟩, |S₋⟩, |11⟩}.
    Eleven,
    /// {|−0⟩, |10⟩}.
    Ten,
}

/// Adiabatically reduced Hamiltonian of a globally driven gate.
pub struct ReducedModel<'a> {
    pub model: &'a GateModel,
    pub sector: ReducedSector,
}

impl ReducedModel<'_> {
    fn real_matrix(&self, t: f64) -> DMatrix<f64> {
        let [d, _] = self.model.pulse.drives(t);
        let p = &self.model.params;
        match self.sector {
            ReducedSector::Eleven => {
                let m: Matrix3<f64> = reduced_h11_physical(d, p.omega_mw, p.v);
                DMatrix::from_fn(3, 3, |i, j| m[(i, j)])
            }
            ReducedSector::Ten => {
                let m: Matrix2<f64> = reduced_h10_physical(d, p.omega_mw);
                DMatrix::from_fn(2, 2, |i, j| m[(i, j)])
            }
        }
    }

    /// Initial reduced state matching amplitude ½ on |11⟩ or |10⟩.
    pub fn initial_state(&self) -> Vec<C64> {
        let mut psi = vec![C64::new(0.0, 0.0); self.dim()];
        psi[self.dim() - 1] = C64::new(0.5, 0.0);
        psi
    }

    /// Full-model populations projected onto this sector's basis.
    pub fn project_full(&self, full: &[C64]) -> Vec<f64> {
        use Level::*;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self.sector {
            ReducedSector::Eleven => {
                let s_minus = (full[StateBasis::index(Minus, One)] + full[StateBasis::index(One, Minus)]) * h;
                vec![
                    full[StateBasis::index(Minus, Minus)].norm_sqr(),
                    s_minus.norm_sqr(),
                    full[StateBasis::index(One, One)].norm_sqr(),
                ]
            }
            ReducedSector::Ten => {
                vec![full[StateBasis::index(Minus, Zero)].norm_sqr(), full[StateBasis::index(One, Zero)].norm_sqr()]
            }
        }
    }
}

impl Hamiltonian for ReducedModel<'_> {
    fn dim(&self) -> usize {
        match self.sector {
            ReducedSector::Eleven => 3,
            ReducedSector::Ten => 2,
        }
    }

    fn apply_minus_i(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        let h = self.real_matrix(t);
        for i in 0..h.nrows() {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..h.ncols() {
                acc += psi[j] * h[(i, j)];
            }
            out[i] = C64::new(acc.im, -acc.re);
        }
    }

    fn matrix(&self, t: f64) -> DMatrix<C64> {
        self.real_matrix(t).map(|x| C64::new(x, 0.0))
    }
}

/// Evolves a reduced sector with the same sample grid as `opts`. The
/// initial state carries amplitude ½ so that populations compare directly
/// with the full evolution from the four-state superposition.
pub fn evolve_reduced(model: &GateModel, sector: ReducedSector, opts: &EvolveOptions) -> Result<Trajectory> {
    let r = ReducedModel { model, sector };
    let mut psi0 = r.initial_state();
    // evolve normalized, then rescale to amplitude ½
    psi0.iter_mut().for_each(|c| *c *= 2.0);
    let mut traj = evolve(&r, &psi0, model.tau(), opts)?;
    for s in traj.states.iter_mut().chain(std::iter::once(&mut traj.final_state)) {
        s.iter_mut().for_each(|c| *c *= 0.5);
    }
    for p in &mut traj.populations {
        p.iter_mut().for_each(|x| *x *= 0.25);
    }
    traj.norm.iter_mut().for_each(|x| *x *= 0.5);
    Ok(traj)
}

/// Writes a trajectory as CSV: t, 16 populations, the 4 computational
/// phases, φ* and the norm.
pub fn write_trajectory_csv<W: std::io::Write>(traj: &Trajectory, mut w: W) -> Result<()> {
    let comp = StateBasis::COMPUTATIONAL;
    writeln!(w, "# rydgate trajectory v1")?;
    let mut header = vec!["t_us".to_string()];
    header.extend((0..DIM).map(|i| format!("p_{}", StateBasis::label(i))));
    header.extend(comp.iter().map(|&i| format!("phi_{}", StateBasis::label(i))));
    header.push("phi_star".into());
    header.push("norm".into());
    writeln!(w, "{}", header.join(","))?;
    let phi_star = traj.entangling_phase_series();
    for k in 0..traj.times.len() {
        let mut row = vec![format!("{:.9}", traj.times[k])];
        row.extend(traj.populations[k].iter().map(|p| format!("{p:.12e}")));
        row.extend(comp.iter().map(|&i| format!("{:.12e}", traj.phases[k][i])));
        row.push(format!("{:.12e}", phi_star[k]));
        row.push(format!("{:.12e}", traj.norm[k]));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
