// SPDX-License-Identifier: Apache-2.0

//! Linear Coulomb crystals in a Paul trap: equilibrium positions, phonon
//! modes and the dipole-dipole coupling between dressed Rydberg ions.
//!
//! Positions are dimensionless, R_i = L Z_i with L = (C e²/(M ω²))^{1/3}.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::atomic::{radial_matrix_element_si, CorePotential, ElectronicState, GridConfig};
use crate::error::{Error, Result};
use crate::units::{COULOMB_CONSTANT, ELEMENTARY_CHARGE, HBAR};

const MAX_NEWTON_ITERATIONS: usize = 200;
const RESIDUAL_TOL: f64 = 1e-12;

/// Secular trap parameters of a linear Paul trap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapParams {
    /// Axial angular frequency ω (rad/s).
    pub omega: f64,
    /// Radial-to-axial anisotropy γ.
    pub gamma: f64,
    pub n_ions: usize,
    /// Ion mass (kg).
    pub mass: f64,
}

impl TrapParams {
    pub fn new(omega: f64, gamma: f64, n_ions: usize, mass: f64) -> Result<Self> {
        let t = Self { omega, gamma, n_ions, mass };
        t.validate()?;
        Ok(t)
    }

    /// From the static axial curvature `beta` (V/m²), rf gradient `alpha`
    /// (V/m²) and rf angular frequency `nu` (rad/s).
    pub fn from_gradients(alpha: f64, beta: f64, nu: f64, n_ions: usize, mass: f64) -> Result<Self> {
        let e = ELEMENTARY_CHARGE;
        let omega = (4.0 * e * beta / mass).sqrt();
        let g2 = 2.0 * e * e * alpha * alpha / (mass * mass * omega * omega * nu * nu) - 0.5;
        if !(g2 > 0.0) {
            return Err(Error::domain("crystal", format!("gradients give γ² = {g2} ≤ 0")));
        }
        Self::new(omega, g2.sqrt(), n_ions, mass)
    }

    /// Two-ion trap whose equilibrium spacing equals `spacing` (m).
    pub fn for_two_ion_spacing(spacing: f64, gamma: f64, mass: f64) -> Result<Self> {
        let gap = 2.0 * 0.25_f64.cbrt();
        let length = spacing / gap;
        let omega = (COULOMB_CONSTANT * ELEMENTARY_CHARGE.powi(2) / (mass * length.powi(3))).sqrt();
        Self::new(omega, gamma, 2, mass)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.gamma > 0.0 && self.mass > 0.0) || self.n_ions == 0 {
            return Err(Error::domain("crystal", format!("invalid trap parameters {self:?}")));
        }
        Ok(())
    }

    /// Characteristic length L (m).
    pub fn length_scale(&self) -> f64 {
        (COULOMB_CONSTANT * ELEMENTARY_CHARGE.powi(2) / (self.mass * self.omega * self.omega)).cbrt()
    }

    /// Oscillator length √(ħ/(2Mω)) (m).
    pub fn oscillation_length(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.omega)).sqrt()
    }

    /// True when the chain is expected to stay one-dimensional.
    pub fn is_linear_chain(&self) -> bool {
        self.n_ions < 2 || self.gamma > critical_anisotropy(self.n_ions)
    }
}

/// Anisotropy below which a chain of `n` ions buckles into a zigzag.
pub fn critical_anisotropy(n: usize) -> f64 {
    0.583 * (n as f64).powf(0.9)
}

/// Normal modes of the chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhononModes {
    /// Generalized eigenvalues γ_p² of K, ascending.
    pub gamma_sq: Vec<f64>,
    /// Axial frequencies γ_{p;z} = √(2γ_p² + 1).
    pub axial: Vec<f64>,
    /// Radial γ_{p;x}² = γ² − γ_p²; negative entries are unstable modes.
    /// The y axis is identical.
    pub radial_sq: Vec<f64>,
    /// Column p is the eigenvector Γ_{·p}.
    pub vectors: DMatrix<f64>,
}

impl PhononModes {
    /// Indices of radial modes with γ_{p;x}² < 0.
    pub fn unstable_radial(&self) -> Vec<usize> {
        self.radial_sq.iter().enumerate().filter(|(_, g)| **g < 0.0).map(|(p, _)| p).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrystalSolution {
    pub z: Vec<f64>,
    pub hessian: DMatrix<f64>,
    pub modes: PhononModes,
    /// Characteristic length L (m).
    pub length: f64,
    /// Oscillator length (m).
    pub oscillation_length: f64,
    pub linear_chain: bool,
}

/// Solves the full crystal for a trap.
pub fn solve_crystal(trap: &TrapParams) -> Result<CrystalSolution> {
    trap.validate()?;
    let z = equilibrium_positions(trap.n_ions)?;
    let k = hessian(&z)?;
    let modes = phonon_modes(&k, trap.gamma)?;
    Ok(CrystalSolution {
        z,
        hessian: k,
        modes,
        length: trap.length_scale(),
        oscillation_length: trap.oscillation_length(),
        linear_chain: trap.is_linear_chain(),
    })
}

/// Force residual Z_i − Σ_{j≠i} Z_ij/|Z_ij|³.
pub fn force_residual(z: &[f64]) -> Vec<f64> {
    (0..z.len())
        .map(|i| {
            let coulomb: f64 = (0..z.len())
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    d.signum() / (d * d)
                })
                .sum();
            z[i] - coulomb
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Dimensionless equilibrium positions of `n` ions, ascending.
pub fn equilibrium_positions(n: usize) -> Result<Vec<f64>> {
    match n {
        0 => return Err(Error::domain("crystal", "need at least one ion")),
        1 => return Ok(vec![0.0]),
        _ => {}
    }
    let nf = n as f64;
    let mean_gap = 1.823 / nf.powf(0.388) - 0.115;
    let half = 0.5 * (nf - 1.0) * mean_gap;
    let mut z: Vec<f64> = (0..n).map(|i| -half + 2.0 * half * i as f64 / (nf - 1.0)).collect();

    let mut res = force_residual(&z);
    let mut res_norm = max_abs(&res);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        if res_norm < RESIDUAL_TOL {
            break;
        }
        let k = hessian(&z)?;
        let jac = DMatrix::identity(n, n) + 2.0 * k;
        let step = jac
            .lu()
            .solve(&DVector::from_column_slice(&res))
            .ok_or_else(|| Error::convergence("crystal", "singular Newton matrix"))?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = z.iter().zip(step.iter()).map(|(zi, s)| zi - lambda * s).collect();
            let ordered = trial.windows(2).all(|w| w[0] < w[1]);
            if ordered {
                let r = force_residual(&trial);
                let rn = max_abs(&r);
                if rn < res_norm || lambda < 1e-6 {
                    z = trial;
                    res = r;
                    res_norm = rn;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                return Err(Error::convergence("crystal", format!("line search failed at residual {res_norm:.3e}")));
            }
        }
    }
    if res_norm >= RESIDUAL_TOL {
        return Err(Error::convergence(
            "crystal",
            format!("Newton did not converge for N = {n}; residual {res_norm:.3e}"),
        ));
    }
    // restore exact mirror symmetry
    let sym: Vec<f64> = (0..n).map(|i| 0.5 * (z[i] - z[n - 1 - i])).collect();
    Ok(sym)
}

/// Generalized Hessian K_ij = δ_ij Σ_{k≠i} 1/|Z_ik|³ − (1 − δ_ij)/|Z_ij|³.
pub fn hessian(z: &[f64]) -> Result<DMatrix<f64>> {
    let n = z.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = (z[i] - z[j]).abs();
            if d == 0.0 {
                return Err(Error::domain("crystal", format!("ions {i} and {j} coincide")));
            }
            let c = 1.0 / (d * d * d);
            k[(i, j)] = -c;
            k[(i, i)] += c;
        }
    }
    Ok(k)
}

/// Diagonalizes K and maps the eigenvalues onto axial and radial frequencies.
pub fn phonon_modes(k: &DMatrix<f64>, gamma: f64) -> Result<PhononModes> {
    let n = k.nrows();
    if n != k.ncols() || (k - k.transpose()).amax() > 1e-12 * k.amax().max(1.0) {
        return Err(Error::domain("crystal", "Hessian must be square and symmetric"));
    }
    let eig = SymmetricEigen::new(k.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = DMatrix::zeros(n, n);
    let mut gamma_sq = Vec::with_capacity(n);
    for (p, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        let lead = v.iter().copied().find(|x| x.abs() > 1e-8).unwrap_or(1.0);
        if lead < 0.0 {
            v = -v;
        }
        vectors.set_column(p, &v);
        gamma_sq.push(eig.eigenvalues[src]);
    }
    Ok(PhononModes {
        axial: gamma_sq.iter().map(|g| (2.0 * g + 1.0).max(0.0).sqrt()).collect(),
        radial_sq: gamma_sq.iter().map(|g| gamma * gamma - g).collect(),
        gamma_sq,
        vectors,
    })
}

/// Anisotropy below which the highest radial mode goes soft for this Hessian.
pub fn radial_instability_threshold(modes: &PhononModes) -> f64 {
    modes.gamma_sq.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Nearest-neighbour gaps of an ascending position vector.
pub fn neighbour_gaps(z: &[f64]) -> Vec<f64> {
    z.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Fit of a/N^b + c.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Root-mean-square residual of the fit.
    pub rms: f64,
}

impl PowerLawFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.a / n.powf(self.b) + self.c
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapSample {
    pub n: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceScaling {
    pub samples: Vec<GapSample>,
    pub min: PowerLawFit,
    pub mean: PowerLawFit,
    pub max: PowerLawFit,
}

pub fn gap_statistics(n: usize) -> Result<GapSample> {
    let gaps = neighbour_gaps(&equilibrium_positions(n)?);
    if gaps.is_empty() {
        return Err(Error::domain("crystal", "gap statistics need N ≥ 2"));
    }
    Ok(GapSample {
        n,
        min: gaps.iter().copied().fold(f64::INFINITY, f64::min),
        mean: gaps.iter().sum::<f64>() / gaps.len() as f64,
        max: gaps.iter().copied().fold(0.0, f64::max),
    })
}

/// Fits a/N^b + c to the min, mean and max nearest-neighbour gaps for every
/// N in `n_lo..=n_hi`.
pub fn distance_scaling_fit(n_lo: usize, n_hi: usize) -> Result<DistanceScaling> {
    if n_lo < 2 || n_hi > 1000 || n_hi < n_lo + 2 {
        return Err(Error::domain("crystal", format!("scaling fit range {n_lo}..={n_hi} outside 2..=1000")));
    }
    let samples: Vec<GapSample> = (n_lo..=n_hi).map(gap_statistics).collect::<Result<_>>()?;
    let ns: Vec<f64> = samples.iter().map(|s| s.n as f64).collect();
    let fit = |f: fn(&GapSample) -> f64| {
        let ys: Vec<f64> = samples.iter().map(f).collect();
        fit_power_law(&ns, &ys)
    };
    Ok(DistanceScaling { min: fit(|s| s.min), mean: fit(|s| s.mean), max: fit(|s| s.max), samples })
}

/// Least squares for (a, c) at fixed b, nested in a golden-section search over b.
pub fn fit_power_law(ns: &[f64], ys: &[f64]) -> PowerLawFit {
    let solve = |b: f64| -> PowerLawFit {
        let m = ns.len() as f64;
        let xs: Vec<f64> = ns.iter().map(|n| n.powf(-b)).collect();
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
        let a = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        let c = (sy - a * sx) / m;
        let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (a * x + c - y).powi(2)).sum();
        PowerLawFit { a, b, c, rms: (ss / m).sqrt() }
    };
    // coarse scan, then golden section around the best bracket
    let grid: Vec<f64> = (1..=300).map(|i| i as f64 * 0.01).collect();
    let best = grid.iter().copied().min_by(|x, y| solve(*x).rms.total_cmp(&solve(*y).rms)).unwrap_or(0.5);
    let (mut lo, mut hi) = ((best - 0.01).max(1e-3), best + 0.01);
    let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if solve(x1).rms < solve(x2).rms {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    solve(0.5 * (lo + hi))
}

/// Dipole-dipole interaction V_ij (rad/s) between ions `i` and `j` dressed
/// on the transition a ↔ b.
pub fn interaction_strength(
    a: &ElectronicState,
    b: &ElectronicState,
    trap: &TrapParams,
    i: usize,
    j: usize,
    potential: &CorePotential,
    grid: &GridConfig,
) -> Result<f64> {
    let r_ab = radial_matrix_element_si(a, b, 1, potential, grid)?;
    let k = hessian(&equilibrium_positions(trap.n_ions)?)?;
    interaction_from_hessian(r_ab, trap, &k, i, j)
}

/// V_ij = −(2/9) M ω² |r_ab|² K_ij / ħ with `r_ab` in metres.
pub fn interaction_from_hessian(r_ab: f64, trap: &TrapParams, k: &DMatrix<f64>, i: usize, j: usize) -> Result<f64> {
    let n = k.nrows();
    if i >= n || j >= n || i == j {
        return Err(Error::domain("crystal", format!("ion pair ({i}, {j}) invalid for N = {n}")));
    }
    Ok(-2.0 / 9.0 * trap.mass * trap.omega * trap.omega * r_ab * r_ab * k[(i, j)] / HBAR)
}
