// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use approx::assert_relative_eq;
use rydgate::atomic::{
    angular_matrix_element, clebsch_gordan, gate_level_scheme, radial_matrix_element, radial_matrix_element_si,
    solve_radial, CorePotential, ElectronicState, GridConfig, HalfInt, IonSpecies,
};
use rydgate::units::HARTREE_IN_INVERSE_CM;
use serde::Deserialize;

fn sr() -> CorePotential {
    CorePotential::model(&IonSpecies::strontium())
}

fn hydrogen_state(n: u32, l: u32) -> ElectronicState {
    let j2 = if l == 0 { 1 } else { 2 * l as i32 + 1 };
    ElectronicState::from_twice(n, l, j2, 1).unwrap()
}

#[test]
fn hydrogen_energies() {
    let grid = GridConfig::default();
    for n in 1..=8 {
        for l in 0..n.min(4) {
            let wf = solve_radial(&hydrogen_state(n, l), &CorePotential::hydrogen(), &grid).unwrap();
            let exact = -0.5 / f64::from(n * n);
            assert_relative_eq!(wf.energy, exact, max_relative = 1e-7);
            assert_eq!(wf.node_count(), (n - l - 1) as usize, "n = {n}, l = {l}");
            assert_relative_eq!(wf.norm(), 1.0, epsilon = 1e-9);
        }
    }
}

#[test]
fn hydrogen_radial_moments() {
    let grid = GridConfig::default();
    let h = CorePotential::hydrogen();
    // <r> = (3n² − l(l+1))/2
    for (n, l) in [(1, 0), (2, 1), (3, 2), (5, 0), (6, 3)] {
        let s = hydrogen_state(n, l);
        let r = radial_matrix_element(&s, &s, 1, &h, &grid).unwrap();
        let exact = (3.0 * f64::from(n * n) - f64::from(l * (l + 1))) / 2.0;
        assert_relative_eq!(r, exact, max_relative = 1e-6);
    }
    // <r²> = n²(5n² + 1 − 3l(l+1))/2
    let s = hydrogen_state(4, 1);
    let r2 = radial_matrix_element(&s, &s, 2, &h, &grid).unwrap();
    assert_relative_eq!(r2, 16.0 * (5.0 * 16.0 + 1.0 - 6.0) / 2.0, max_relative = 1e-6);
    // closed-form dipole elements including sign
    let r_1s2p = radial_matrix_element(&hydrogen_state(1, 0), &hydrogen_state(2, 1), 1, &h, &grid).unwrap();
    assert_relative_eq!(r_1s2p, 128.0 * 6f64.sqrt() / 243.0, max_relative = 1e-6);
    let r_2s2p = radial_matrix_element(&hydrogen_state(2, 0), &hydrogen_state(2, 1), 1, &h, &grid).unwrap();
    assert_relative_eq!(r_2s2p, -3.0 * 3f64.sqrt(), max_relative = 1e-6);
}

#[test]
fn radial_elements_are_symmetric() {
    let grid = GridConfig::default();
    let [s0, _, p2, _, _] = gate_level_scheme(46);
    let a = radial_matrix_element(&s0, &p2, 1, &sr(), &grid).unwrap();
    let b = radial_matrix_element(&p2, &s0, 1, &sr(), &grid).unwrap();
    assert_eq!(a, b);
}

#[derive(Deserialize)]
struct Level {
    label: String,
    n: u32,
    l: u32,
    j2: i32,
    energy: f64,
}

#[derive(Deserialize)]
struct Levels {
    ionization_limit: f64,
    level: Vec<Level>,
}

/// Model-potential binding energies against measured Sr II levels.
#[test]
fn strontium_levels_match_measurements() {
    let text = include_str!("../data/sr_ii_levels.toml");
    let levels: Levels = toml::from_str(text).unwrap();
    let grid = GridConfig::default();
    for lv in &levels.level {
        let state = ElectronicState::from_twice(lv.n, lv.l, lv.j2, lv.j2).unwrap();
        let wf = solve_radial(&state, &sr(), &grid).unwrap();
        let binding = -wf.energy * HARTREE_IN_INVERSE_CM;
        let measured = levels.ionization_limit - lv.energy;
        let rel = (binding - measured).abs() / measured;
        assert!(rel < 5e-3, "{}: computed {binding:.1} cm⁻¹, measured {measured:.1} cm⁻¹", lv.label);
    }
}

/// Dipole radial elements of the n = 46 gate scheme in metres.
#[test]
fn strontium_dipole_golden_values() {
    let grid = GridConfig::default();
    let s = gate_level_scheme(46);
    let cases = [(2, 0, -7.18e-12), (0, 4, 7.96e-14), (1, 2, -6.87e-12), (2, 3, 1.13e-12), (3, 4, -6.37e-8)];
    for (bra, ket, reference) in cases {
        let v = radial_matrix_element_si(&s[bra], &s[ket], 1, &sr(), &grid).unwrap();
        let rel = (v.abs() - f64::abs(reference)).abs() / f64::abs(reference);
        assert!(rel < 0.05, "<{bra}|r|{ket}> = {v:.3e} m, reference {reference:.2e} m");
    }
}

/// Quadrupole radial elements of the same scheme in square metres.
#[test]
fn strontium_quadrupole_golden_values() {
    let grid = GridConfig::default();
    let s = gate_level_scheme(46);
    let cases = [(1, 0, 3.58e-20), (1, 3, -6.50e-23), (2, 4, -6.29e-22), (1, 1, 3.03e-20), (2, 2, 2.94e-19)];
    for (bra, ket, reference) in cases {
        let v = radial_matrix_element_si(&s[bra], &s[ket], 2, &sr(), &grid).unwrap();
        let rel = (v.abs() - f64::abs(reference)).abs() / f64::abs(reference);
        assert!(rel < 0.05, "<{bra}|r²|{ket}> = {v:.3e} m², reference {reference:.2e} m²");
    }
}

#[test]
fn gate_scheme_angular_elements() {
    let s = gate_level_scheme(46).map(|x| x.angular());
    let y = |bra: usize, k: u32, mk: i32, ket: usize| angular_matrix_element(&s[bra], k, mk, &s[ket]);
    let dipole = [
        (2, 0, (1.0 / (4.0 * PI)).sqrt()),
        (0, 4, -(1.0 / (6.0 * PI)).sqrt()),
        (1, 2, (3.0 / (10.0 * PI)).sqrt()),
        (2, 3, (1.0 / (4.0 * PI)).sqrt()),
        (3, 4, -(1.0 / (6.0 * PI)).sqrt()),
    ];
    for (bra, ket, exact) in dipole {
        assert!((y(bra, 1, -1, ket) - exact).abs() < 1e-12, "<{bra}|Y1^-1|{ket}>");
        // Y_1^{+1} elements are minus the transposed Y_1^{-1} elements
        assert!((y(ket, 1, 1, bra) + exact).abs() < 1e-12, "<{ket}|Y1^1|{bra}>");
    }
    let quadrupole = [
        (1, 0, -2, (1.0 / (4.0 * PI)).sqrt()),
        (1, 3, -2, (1.0 / (4.0 * PI)).sqrt()),
        (2, 4, -2, -(1.0 / (5.0 * PI)).sqrt()),
        (1, 1, 0, -(5.0 / (49.0 * PI)).sqrt()),
        (2, 2, 0, -(1.0 / (20.0 * PI)).sqrt()),
    ];
    for (bra, ket, mk, exact) in quadrupole {
        assert!((y(bra, 2, mk, ket) - exact).abs() < 1e-12, "<{bra}|Y2^{mk}|{ket}>");
        assert!((y(ket, 2, -mk, bra) - exact).abs() < 1e-12, "<{ket}|Y2^{}|{bra}>", -mk);
    }
    // every other dipole element between the five states vanishes
    let listed: Vec<(usize, usize)> = dipole.iter().map(|&(b, k, _)| (b, k)).collect();
    for bra in 0..5 {
        for ket in 0..5 {
            if !listed.contains(&(bra, ket)) {
                assert_eq!(y(bra, 1, -1, ket), 0.0, "<{bra}|Y1^-1|{ket}>");
            }
        }
    }
}

/// Clebsch–Gordan table built by lowering |j1 j1⟩|j2 j2⟩ with J₋ and
/// Gram–Schmidt orthogonalization, Condon–Shortley phases.
struct LadderTable {
    j1: i32,
    j2: i32,
    /// (twice j, twice m) → coefficients over (m1 index, m2 index).
    states: Vec<((i32, i32), Vec<f64>)>,
}

impl LadderTable {
    fn idx(&self, m1: i32, m2: i32) -> usize {
        (((self.j1 + m1) / 2) * (self.j2 + 1) + (self.j2 + m2) / 2) as usize
    }

    fn lower(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        let ladder = |j: i32, m: i32| (f64::from(j * (j + 2) - m * (m - 2)) / 4.0).sqrt();
        for m1 in (-self.j1..=self.j1).step_by(2) {
            for m2 in (-self.j2..=self.j2).step_by(2) {
                let c = v[self.idx(m1, m2)];
                if c == 0.0 {
                    continue;
                }
                if m1 > -self.j1 {
                    out[self.idx(m1 - 2, m2)] += c * ladder(self.j1, m1);
                }
                if m2 > -self.j2 {
                    out[self.idx(m1, m2 - 2)] += c * ladder(self.j2, m2);
                }
            }
        }
        let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.iter().map(|x| x / norm).collect()
    }

    fn new(j1: i32, j2: i32) -> Self {
        let mut t = Self { j1, j2, states: Vec::new() };
        let dim = ((j1 + 1) * (j2 + 1)) as usize;
        for j in ((j1 - j2).abs()..=j1 + j2).rev().step_by(2) {
            // top state m = j orthogonal to the m = j states of larger J
            // any vector with a component outside the span of the larger J works
            let mut top = vec![0.0; dim];
            for (k, m1) in (-j1..=j1).step_by(2).enumerate() {
                let m2 = j - m1;
                if m2.abs() <= j2 && (j2 - m2) % 2 == 0 {
                    top[t.idx(m1, m2)] = 1.0 + 0.37 * k as f64;
                }
            }
            // two passes of Gram–Schmidt keep the result orthogonal to rounding
            for _ in 0..2 {
                for (_, prev) in t.states.iter().filter(|((_, m), _)| *m == j) {
                    let dot: f64 = top.iter().zip(prev).map(|(a, b)| a * b).sum();
                    top.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
                }
            }
            let norm = top.iter().map(|x| x * x).sum::<f64>().sqrt();
            let sign = if top[t.idx(j1, j - j1)] < 0.0 { -1.0 } else { 1.0 };
            let mut v: Vec<f64> = top.iter().map(|x| sign * x / norm).collect();
            let mut m = j;
            loop {
                t.states.push(((j, m), v.clone()));
                if m == -j {
                    break;
                }
                v = t.lower(&v);
                m -= 2;
            }
        }
        t
    }
}

#[test]
fn clebsch_gordan_matches_ladder_construction() {
    for j1 in 0..=6 {
        for j2 in 0..=4 {
            let table = LadderTable::new(j1, j2);
            for ((j, m), v) in &table.states {
                for m1 in (-j1..=j1).step_by(2) {
                    for m2 in (-j2..=j2).step_by(2) {
                        let expected = if m1 + m2 == *m { v[table.idx(m1, m2)] } else { 0.0 };
                        let got = clebsch_gordan(HalfInt(j1), HalfInt(m1), HalfInt(j2), HalfInt(m2), HalfInt(*j), HalfInt(*m));
                        assert!(
                            (got - expected).abs() < 1e-12,
                            "<{j1}/2 {m1}/2 {j2}/2 {m2}/2|{j}/2 {m}/2>: {got} vs {expected}"
                        );
                    }
                }
            }
        }
    }
}
