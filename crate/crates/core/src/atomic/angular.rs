// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::HalfInt;
use crate::error::Result;

/// Orbital and fine-structure quantum numbers of one side of an angular
/// matrix element; the spin is always 1/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngularState {
    pub l: u32,
    pub j: HalfInt,
    pub mj: HalfInt,
}

fn factorial(n: i32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * f64::from(k))
}

/// Half of an even twice-value, or `None` when odd or negative.
fn half(twice: i32) -> Option<i32> {
    (twice >= 0 && twice % 2 == 0).then_some(twice / 2)
}

/// Clebsch–Gordan coefficient ⟨j1 m1 j2 m2 | j m⟩ in the Condon–Shortley
/// phase convention, evaluated with Racah's closed-form sum.
pub fn clebsch_gordan(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, j: HalfInt, m: HalfInt) -> f64 {
    let (j1, m1, j2, m2, j, m) = (j1.0, m1.0, j2.0, m2.0, j.0, m.0);
    if m1 + m2 != m || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    let triangle = [j1 + j2 - j, j1 - j2 + j, -j1 + j2 + j, j1 + j2 + j];
    let Some([a, b, c, s]) = triangle.map(half).into_iter().collect::<Option<Vec<_>>>().map(|v| [v[0], v[1], v[2], v[3]])
    else {
        return 0.0;
    };
    let proj = [j1 + m1, j1 - m1, j2 + m2, j2 - m2, j + m, j - m];
    let Some(p) = proj.map(half).into_iter().collect::<Option<Vec<_>>>() else {
        return 0.0;
    };
    let (j1pm, j1mm, j2pm, j2mm, jpm, jmm) = (p[0], p[1], p[2], p[3], p[4], p[5]);

    let pre = (f64::from(j + 1) * factorial(a) * factorial(b) * factorial(c) / factorial(s + 1)).sqrt()
        * (factorial(jpm) * factorial(jmm) * factorial(j1pm) * factorial(j1mm) * factorial(j2pm) * factorial(j2mm)).sqrt();

    // k runs over all values keeping every factorial argument non-negative
    let t4 = (j - j2 + m1) / 2;
    let t5 = (j - j1 - m2) / 2;
    let k_min = 0.max(-t4).max(-t5);
    let k_max = a.min(j1mm).min(j2pm);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let den = factorial(k)
            * factorial(a - k)
            * factorial(j1mm - k)
            * factorial(j2pm - k)
            * factorial(t4 + k)
            * factorial(t5 + k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / den;
    }
    pre * sum
}

/// [`clebsch_gordan`] with plain floating-point arguments, rejecting values
/// that are not multiples of 1/2.
pub fn clebsch_gordan_f64(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    Ok(clebsch_gordan(
        HalfInt::from_f64(j1)?,
        HalfInt::from_f64(m1)?,
        HalfInt::from_f64(j2)?,
        HalfInt::from_f64(m2)?,
        HalfInt::from_f64(j)?,
        HalfInt::from_f64(m)?,
    ))
}

/// ⟨l' s j' m_j'| Y_k^{m_k} |l s j m_j⟩ for s = 1/2.
pub fn angular_matrix_element(bra: &AngularState, k: u32, mk: i32, ket: &AngularState) -> f64 {
    if bra.mj.0 != ket.mj.0 + 2 * mk {
        return 0.0;
    }
    let (l, lp) = (ket.l as i32, bra.l as i32);
    let k = k as i32;
    if lp < (l - k).abs() || lp > l + k || mk.abs() > k {
        return 0.0;
    }
    let hi = HalfInt::from_int;
    let gaunt0 = clebsch_gordan(hi(l), hi(0), hi(k), hi(0), hi(lp), hi(0));
    if gaunt0 == 0.0 {
        return 0.0;
    }
    let half = HalfInt(1);
    let mut sum = 0.0;
    for ms in [-1, 1] {
        let ml = ket.mj.0 - ms; // twice m_l
        let mlp = ml + 2 * mk;
        sum += clebsch_gordan(hi(lp), HalfInt(mlp), half, HalfInt(ms), bra.j, bra.mj)
            * clebsch_gordan(hi(l), HalfInt(ml), half, HalfInt(ms), ket.j, ket.mj)
            * clebsch_gordan(hi(l), HalfInt(ml), hi(k), hi(mk), hi(lp), HalfInt(mlp));
    }
    let pre = (f64::from(2 * k + 1) / (4.0 * PI)).sqrt() * (f64::from(2 * l + 1) / f64::from(2 * lp + 1)).sqrt();
    pre * gaunt0 * sum
}
