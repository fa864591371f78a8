// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{ElectronicState, IonSpecies};
use crate::error::{Error, Result};
use crate::units::{BOHR_RADIUS, FINE_STRUCTURE};

/// Potential felt by the valence electron.
#[derive(Clone, Debug, PartialEq)]
pub enum CorePotential {
    /// Parametric model potential of an alkaline-earth ion, with the
    /// regularized spin-orbit term switched on or off.
    Model { species: IonSpecies, spin_orbit: bool },
    /// Bare Coulomb potential −charge/r; no polarization, no spin-orbit.
    Hydrogenic { charge: f64 },
}

impl CorePotential {
    pub fn model(species: &IonSpecies) -> Self {
        CorePotential::Model { species: species.clone(), spin_orbit: true }
    }

    pub fn hydrogen() -> Self {
        CorePotential::Hydrogenic { charge: 1.0 }
    }

    /// Asymptotic charge seen by the electron at large r.
    fn asymptotic_charge(&self) -> f64 {
        match self {
            CorePotential::Model { species, .. } => f64::from(species.core_charge),
            CorePotential::Hydrogenic { charge } => *charge,
        }
    }

    /// V_C + V_P and its radial derivative.
    fn nonrelativistic(&self, r: f64, l: u32) -> (f64, f64) {
        match self {
            CorePotential::Hydrogenic { charge } => (-charge / r, charge / (r * r)),
            CorePotential::Model { species, .. } => model_terms(r, l, species),
        }
    }

    /// Full radial potential for a state with orbital l and total 2j.
    fn total(&self, r: f64, l: u32, j2: i32) -> f64 {
        let (v, dv) = self.nonrelativistic(r, l);
        match self {
            CorePotential::Model { spin_orbit: true, .. } if l > 0 => {
                let j = f64::from(j2) / 2.0;
                let lf = f64::from(l);
                let ls = 0.5 * (j * (j + 1.0) - lf * (lf + 1.0) - 0.75);
                let a2 = FINE_STRUCTURE * FINE_STRUCTURE;
                let norm = (1.0 - 0.5 * a2 * v).powi(2);
                v + 0.5 * a2 * dv * ls / (r * norm)
            }
            _ => v,
        }
    }
}

impl From<&IonSpecies> for CorePotential {
    fn from(species: &IonSpecies) -> Self {
        CorePotential::model(species)
    }
}

fn model_terms(r: f64, l: u32, species: &IonSpecies) -> (f64, f64) {
    let ch = species.channel(l);
    let z = f64::from(species.z);
    let zc = f64::from(species.core_charge);
    let e1 = (-ch.k1 * r).exp();
    let e3 = (-ch.k3 * r).exp();
    let zn = zc + (z - zc) * e1 + ch.k2 * r * e3;
    let dzn = -(z - zc) * ch.k1 * e1 + ch.k2 * e3 * (1.0 - ch.k3 * r);
    let vc = -zn / r;
    let dvc = zn / (r * r) - dzn / r;

    let s = (r / ch.rc).powi(6);
    let es = (-s).exp();
    let r4 = r.powi(4);
    let vp = -species.alpha_d / (2.0 * r4) * (1.0 - es);
    let dvp = 2.0 * species.alpha_d / (r4 * r) * (1.0 - es) - 3.0 * species.alpha_d * r * es / ch.rc.powi(6);
    (vc + vp, dvc + dvp)
}

/// Screened Coulomb plus core-polarization potential in Hartree at radius `r`
/// (Bohr radii) for channel `l`. The spin-orbit term is added by
/// [`solve_radial`].
pub fn model_potential(r: f64, l: u32, species: &IonSpecies) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain("atomic", format!("model potential needs r > 0, got {r}")));
    }
    Ok(model_terms(r, l, species).0)
}

/// Logarithmic radial grid settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Innermost point (Bohr radii).
    pub r_min: f64,
    /// Number of grid points.
    pub points: usize,
    /// Outermost point; `None` derives it from the principal quantum number.
    pub r_max: Option<f64>,
    /// Energy convergence threshold (Hartree, relative to |E|).
    pub energy_tol: f64,
    pub max_iterations: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { r_min: 1e-4, points: 20_000, r_max: None, energy_tol: 1e-13, max_iterations: 400 }
    }
}

impl GridConfig {
    /// Outer edge for principal quantum number `n`: 3n(n+1) plus a fixed
    /// margin so that low-n tails are not clipped.
    pub fn r_max_for(&self, n: u32) -> f64 {
        self.r_max.unwrap_or_else(|| {
            let n = f64::from(n);
            3.0 * n * (n + 1.0) + 30.0
        })
    }

    fn validate(&self, n: u32) -> Result<()> {
        let r_max = self.r_max_for(n);
        if !(self.r_min > 0.0 && r_max > self.r_min && self.points >= 100) {
            return Err(Error::domain(
                "atomic",
                format!("bad grid: r_min = {}, r_max = {r_max}, points = {}", self.r_min, self.points),
            ));
        }
        Ok(())
    }

    fn build(&self, n: u32) -> LogGrid {
        let r_max = self.r_max_for(n);
        let x0 = self.r_min.ln();
        let dx = (r_max.ln() - x0) / (self.points - 1) as f64;
        let r = (0..self.points).map(|i| (x0 + i as f64 * dx).exp()).collect();
        LogGrid { r, dx }
    }
}

struct LogGrid {
    r: Vec<f64>,
    dx: f64,
}

/// Bound-state radial function Φ(r) = r R(r), normalized so ∫Φ² dr = 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialWavefunction {
    pub n: u32,
    pub l: u32,
    /// Twice the total angular momentum.
    pub j2: i32,
    /// Radial points (Bohr radii), strictly increasing.
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Eigenenergy (Hartree) relative to the ionization threshold.
    pub energy: f64,
}

impl RadialWavefunction {
    pub fn node_count(&self) -> usize {
        let scale = self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let floor = scale * 1e-12;
        let mut nodes = 0;
        let mut last = 0.0_f64;
        for &v in &self.values {
            if v.abs() <= floor {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                nodes += 1;
            }
            last = v;
        }
        nodes
    }

    /// ∫ Φ² dr by the trapezoidal rule on the stored grid.
    pub fn norm(&self) -> f64 {
        trapezoid(&self.grid, |i| self.values[i] * self.values[i])
    }

    /// ∫ Φ_self r^k Φ_other dr in Bohr radii to the k. Both functions must
    /// live on the same grid.
    pub fn moment(&self, other: &RadialWavefunction, k: i32) -> Result<f64> {
        if self.grid.len() != other.grid.len()
            || self.grid.first() != other.grid.first()
            || self.grid.last() != other.grid.last()
        {
            return Err(Error::domain("atomic", "radial functions live on different grids"));
        }
        Ok(trapezoid(&self.grid, |i| self.values[i] * other.values[i] * self.grid[i].powi(k)))
    }

    /// Writes `r,phi` rows with a comment header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# rydgate radial v1: n={} l={} j={}/2 energy_hartree={:.15e}", self.n, self.l, self.j2, self.energy)?;
        writeln!(w, "r_bohr,phi")?;
        for (r, v) in self.grid.iter().zip(&self.values) {
            writeln!(w, "{r:.10e},{v:.10e}")?;
        }
        Ok(())
    }
}

fn trapezoid(r: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    let mut prev = f(0);
    for i in 1..r.len() {
        let cur = f(i);
        acc += 0.5 * (prev + cur) * (r[i] - r[i - 1]);
        prev = cur;
    }
    acc
}

/// Solves the radial equation for `target` on a grid sized for its own n.
pub fn solve_radial(target: &ElectronicState, potential: &CorePotential, grid: &GridConfig) -> Result<RadialWavefunction> {
    solve_on_grid(target, potential, grid, target.n)
}

/// Radial matrix element ⟨a|r^k|b⟩ in Bohr radii to the k. Both states are
/// solved on the grid of the larger principal quantum number so that the
/// result is exactly symmetric in a and b.
pub fn radial_matrix_element(
    a: &ElectronicState,
    b: &ElectronicState,
    k: i32,
    potential: &CorePotential,
    grid: &GridConfig,
) -> Result<f64> {
    if !(1..=2).contains(&k) {
        return Err(Error::domain("atomic", format!("radial power k = {k} not in {{1, 2}}")));
    }
    let n_grid = a.n.max(b.n);
    let wa = solve_on_grid(a, potential, grid, n_grid)?;
    let wb = if a.n == b.n && a.l == b.l && a.j == b.j { wa.clone() } else { solve_on_grid(b, potential, grid, n_grid)? };
    wa.moment(&wb, k)
}

/// [`radial_matrix_element`] converted to metres to the k.
pub fn radial_matrix_element_si(
    a: &ElectronicState,
    b: &ElectronicState,
    k: i32,
    potential: &CorePotential,
    grid: &GridConfig,
) -> Result<f64> {
    Ok(radial_matrix_element(a, b, k, potential, grid)? * BOHR_RADIUS.powi(k))
}

const RESCALE: f64 = 1e120;

fn solve_on_grid(target: &ElectronicState, potential: &CorePotential, cfg: &GridConfig, n_grid: u32) -> Result<RadialWavefunction> {
    target.validate()?;
    cfg.validate(n_grid)?;
    let LogGrid { r, dx } = cfg.build(n_grid);
    let m = r.len();
    let l = target.l;
    let j2 = target.j.twice();
    let lhalf2 = (f64::from(l) + 0.5).powi(2);
    let ddx12 = dx * dx / 12.0;
    let wanted_nodes = (target.n - l - 1) as usize;

    let v: Vec<f64> = r.iter().map(|&ri| potential.total(ri, l, j2)).collect();
    let lf = f64::from(l);
    let veff = |i: usize| v[i] + lf * (lf + 1.0) / (2.0 * r[i] * r[i]);

    let mut e_lo = (0..m).map(veff).fold(f64::INFINITY, f64::min);
    let mut e_hi = veff(m - 1);
    let bracket0 = (e_lo, e_hi);
    if !(e_lo < e_hi) {
        return Err(no_bracket(target, bracket0));
    }

    // Rydberg-formula guess with the asymptotic charge.
    let zc = potential.asymptotic_charge();
    let mut e = -zc * zc / (2.0 * f64::from(target.n).powi(2));
    if !(e > e_lo && e < e_hi) {
        e = 0.5 * (e_lo + e_hi);
    }

    let mut g = vec![0.0; m];
    let mut y = vec![0.0; m];
    let zeta = match potential {
        CorePotential::Model { species, .. } => f64::from(species.z),
        CorePotential::Hydrogenic { charge } => *charge,
    };

    for _ in 0..cfg.max_iterations {
        // Numerov weights w_i = 1 − dx²/12 · [(l+½)² + 2r²(V − E)].
        for i in 0..m {
            g[i] = 1.0 - ddx12 * (lhalf2 + 2.0 * r[i] * r[i] * (v[i] - e));
        }
        // outermost classically allowed point
        let icl = (1..m).rev().find(|&i| g[i] > 1.0);
        let icl = match icl {
            None => {
                e_lo = e;
                e = 0.5 * (e_lo + e_hi);
                continue;
            }
            Some(i) if i >= m - 3 => {
                e_hi = e;
                e = 0.5 * (e_lo + e_hi);
                continue;
            }
            Some(i) => i.max(2),
        };

        // outward
        for i in 0..2 {
            y[i] = r[i].powf(lf + 0.5) * (1.0 - zeta * r[i] / (lf + 1.0));
        }
        let mut nodes = 0;
        for i in 1..icl {
            y[i + 1] = ((12.0 - 10.0 * g[i]) * y[i] - g[i - 1] * y[i - 1]) / g[i + 1];
            if y[i + 1] != 0.0 && y[i] != 0.0 && y[i + 1].signum() != y[i].signum() {
                nodes += 1;
            }
            if y[i + 1].abs() > RESCALE {
                for yy in &mut y[..=i + 1] {
                    *yy /= RESCALE;
                }
            }
        }
        if nodes != wanted_nodes {
            if nodes > wanted_nodes {
                e_hi = e;
            } else {
                e_lo = e;
            }
            e = 0.5 * (e_lo + e_hi);
            if (e_hi - e_lo).abs() < 1e-15 * e.abs().max(1e-300) {
                break;
            }
            continue;
        }
        let y_match = y[icl];

        // inward
        y[m - 1] = dx;
        y[m - 2] = (12.0 - 10.0 * g[m - 1]) * y[m - 1] / g[m - 2];
        for i in (icl + 1..m - 1).rev() {
            y[i - 1] = ((12.0 - 10.0 * g[i]) * y[i] - g[i + 1] * y[i + 1]) / g[i - 1];
            if y[i - 1].abs() > RESCALE {
                for yy in &mut y[i - 1..] {
                    *yy /= RESCALE;
                }
            }
        }
        let scale = y_match / y[icl];
        for yy in &mut y[icl..] {
            *yy *= scale;
        }

        // normalize: ∫Φ² dr = ∫ y² r² dx
        let norm: f64 = (0..m).map(|i| y[i] * y[i] * r[i] * r[i]).sum::<f64>() * dx;
        let inv = 1.0 / norm.sqrt();
        for yy in &mut y {
            *yy *= inv;
        }

        // energy correction from the derivative discontinuity at icl
        let ycusp = (y[icl - 1] * g[icl - 1] + y[icl + 1] * g[icl + 1] + 10.0 * g[icl] * y[icl]) / 12.0;
        let dfcusp = g[icl] * (y[icl] / ycusp - 1.0);
        let de = 0.5 * dfcusp / ddx12 * ycusp * ycusp * dx;
        if de > 0.0 {
            e_lo = e;
        } else if de < 0.0 {
            e_hi = e;
        }
        let tol = cfg.energy_tol * e.abs().max(1e-6);
        let converged = de.abs() <= tol || e_hi - e_lo <= tol;
        e += de;
        if !(e > e_lo && e < e_hi) {
            e = 0.5 * (e_lo + e_hi);
        }
        if converged {
            return Ok(finish(target, r, y, e));
        }
        log::trace!("{}: E = {e:.15e}, dE = {de:.3e}", target.label());
    }
    Err(Error::convergence(
        "atomic",
        format!(
            "no eigenvalue for {} after {} iterations; searched E in [{:.6e}, {:.6e}] Ha, final bracket [{:.6e}, {:.6e}]",
            target.label(),
            cfg.max_iterations,
            bracket0.0,
            bracket0.1,
            e_lo,
            e_hi
        ),
    ))
}

fn no_bracket(target: &ElectronicState, bracket: (f64, f64)) -> Error {
    Error::convergence(
        "atomic",
        format!("empty energy window for {}: [{:.6e}, {:.6e}] Ha", target.label(), bracket.0, bracket.1),
    )
}

fn finish(target: &ElectronicState, r: Vec<f64>, y: Vec<f64>, energy: f64) -> RadialWavefunction {
    let mut values: Vec<f64> = r.iter().zip(&y).map(|(ri, yi)| yi * ri.sqrt()).collect();
    let norm = trapezoid(&r, |i| values[i] * values[i]);
    let inv = 1.0 / norm.sqrt();
    let sign = values.iter().find(|v| v.abs() > 1e-200).map_or(1.0, |v| v.signum());
    for v in &mut values {
        *v *= inv * sign;
    }
    RadialWavefunction { n: target.n, l: target.l, j2: target.j.twice(), grid: r, values, energy }
}
