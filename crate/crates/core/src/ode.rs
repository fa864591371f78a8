// SPDX-License-Identifier: Apache-2.0

//! Dormand–Prince 8(5,3) explicit Runge–Kutta integrator with the 7th-order
//! continuous extension, specialised to complex state vectors.
//!
//! Step control follows Hairer's DOP853: the local error is measured with the
//! combined 5th/3rd-order estimators against `atol + rtol·max(|y|, |y_new|)`
//! in the RMS norm, and the extra three stages for dense output are evaluated
//! only for steps that contain a requested sample time.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const N_STAGES: usize = 12;
const N_STAGES_EXTENDED: usize = 16;
const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

include!("ode_coefficients.rs");

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub max_step: f64,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Self::default() }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-10, max_steps: 5_000_000, max_step: f64::INFINITY }
    }
}

#[derive(Clone, Debug, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Clone, Debug)]
pub struct OdeSolution {
    /// States at the requested sample times, in order.
    pub samples: Vec<Vec<C64>>,
    /// State at the end of the interval.
    pub y_final: Vec<C64>,
    pub stats: OdeStats,
}

fn rms_norm(v: impl Iterator<Item = f64>, n: usize) -> f64 {
    (v.map(|x| x * x).sum::<f64>() / n as f64).sqrt()
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1`.
///
/// `samples` must be non-decreasing and lie in `[t0, t1]`; the returned
/// states at those times come from the continuous extension. The final state
/// is always the integrator state at exactly `t1`.
pub fn dop853<F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: &[C64],
    samples: &[f64],
    opts: &OdeOptions,
) -> Result<OdeSolution>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y0.len();
    if !(t1 > t0) {
        return Err(Error::domain("dynamics", format!("empty integration interval [{t0}, {t1}]")));
    }
    if samples.windows(2).any(|w| w[1] < w[0])
        || samples.iter().any(|&s| s < t0 || s > t1 || !s.is_finite())
    {
        return Err(Error::domain("dynamics", "sample times must be sorted and inside [t0, t1]"));
    }

    let mut stats = OdeStats::default();
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; N_STAGES_EXTENDED];
    let mut y = y0.to_vec();
    let mut y_new = vec![C64::new(0.0, 0.0); n];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut fy = vec![C64::new(0.0, 0.0); n];
    f(t0, &y, &mut fy);
    stats.evaluations += 1;

    let mut out = Vec::with_capacity(samples.len());
    let mut next_sample = 0;
    while next_sample < samples.len() && samples[next_sample] <= t0 {
        out.push(y.clone());
        next_sample += 1;
    }

    let mut t = t0;
    let mut h_abs = initial_step(&mut f, t0, t1, &y, &fy, opts, &mut stats).min(opts.max_step);

    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integration { t, msg: format!("exceeded {} steps", opts.max_steps) });
        }
        let min_step = 10.0 * (next_up(t) - t);
        let mut rejected = false;
        let (t_new, h, f_new) = loop {
            if h_abs < min_step {
                return Err(Error::Integration {
                    t,
                    msg: format!("step size underflow (h = {h_abs:.3e})"),
                });
            }
            let mut t_new = t + h_abs;
            if t_new > t1 {
                t_new = t1;
            }
            let h = t_new - t;
            h_abs = h;

            k[0].copy_from_slice(&fy);
            for s in 1..N_STAGES {
                stage_input(&y, &k, A[s], h, &mut tmp);
                let (_, tail) = k.split_at_mut(s);
                f(t + C[s] * h, &tmp, &mut tail[0]);
            }
            stats.evaluations += N_STAGES - 1;
            stage_input(&y, &k, A[N_STAGES], h, &mut y_new);
            let mut f_new = vec![C64::new(0.0, 0.0); n];
            f(t_new, &y_new, &mut f_new);
            stats.evaluations += 1;
            k[N_STAGES].copy_from_slice(&f_new);

            let mut e5 = 0.0;
            let mut e3 = 0.0;
            for i in 0..n {
                let scale = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                let mut err5 = C64::new(0.0, 0.0);
                let mut err3 = C64::new(0.0, 0.0);
                for s in 0..=N_STAGES {
                    err5 += k[s][i] * E5[s];
                    err3 += k[s][i] * E3[s];
                }
                e5 += (err5 / scale).norm_sqr();
                e3 += (err3 / scale).norm_sqr();
            }
            let err = if e5 == 0.0 && e3 == 0.0 {
                0.0
            } else {
                h * e5 / ((e5 + 0.01 * e3) * n as f64).sqrt()
            };

            if err < 1.0 {
                let mut factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    MAX_FACTOR.min(SAFETY * err.powf(ERROR_EXPONENT))
                };
                if rejected {
                    factor = factor.min(1.0);
                }
                h_abs = (h_abs * factor).min(opts.max_step);
                stats.accepted += 1;
                break (t_new, h, f_new);
            }
            h_abs *= MIN_FACTOR.max(SAFETY * err.powf(ERROR_EXPONENT));
            rejected = true;
            stats.rejected += 1;
        };

        if next_sample < samples.len() && samples[next_sample] <= t_new {
            let dense = DenseStep::new(&mut f, t, h, &y, &y_new, &fy, &f_new, &mut k, &mut tmp);
            stats.evaluations += N_STAGES_EXTENDED - N_STAGES - 1;
            while next_sample < samples.len() && samples[next_sample] <= t_new {
                out.push(dense.eval(samples[next_sample]));
                next_sample += 1;
            }
        }

        t = t_new;
        std::mem::swap(&mut y, &mut y_new);
        fy = f_new;
    }

    Ok(OdeSolution { samples: out, y_final: y, stats })
}

fn next_up(t: f64) -> f64 {
    if t == 0.0 {
        f64::MIN_POSITIVE
    } else {
        f64::from_bits(if t > 0.0 { t.to_bits() + 1 } else { t.to_bits() - 1 })
    }
}

fn stage_input(y: &[C64], k: &[Vec<C64>], row: &[(usize, f64)], h: f64, out: &mut [C64]) {
    out.copy_from_slice(y);
    for &(j, a) in row {
        let ha = h * a;
        for (o, kj) in out.iter_mut().zip(&k[j]) {
            *o += kj * ha;
        }
    }
}

fn initial_step<F>(
    f: &mut F,
    t0: f64,
    t1: f64,
    y0: &[C64],
    f0: &[C64],
    opts: &OdeOptions,
    stats: &mut OdeStats,
) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y0.len();
    let scale: Vec<f64> = y0.iter().map(|y| opts.atol + y.norm() * opts.rtol).collect();
    let d0 = rms_norm(y0.iter().zip(&scale).map(|(y, s)| y.norm() / s), n);
    let d1 = rms_norm(f0.iter().zip(&scale).map(|(y, s)| y.norm() / s), n);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(t1 - t0);
    let y1: Vec<C64> = y0.iter().zip(f0).map(|(y, d)| y + d * h0).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); n];
    f(t0 + h0, &y1, &mut f1);
    stats.evaluations += 1;
    let d2 = rms_norm(f1.iter().zip(f0).zip(&scale).map(|((a, b), s)| (a - b).norm() / s), n) / h0;
    let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 8.0)
    };
    (100.0 * h0).min(h1).min(t1 - t0)
}

/// Continuous extension of one accepted step.
struct DenseStep {
    t_old: f64,
    h: f64,
    y_old: Vec<C64>,
    coeffs: [Vec<C64>; 7],
}

impl DenseStep {
    #[allow(clippy::too_many_arguments)]
    fn new<F>(
        f: &mut F,
        t_old: f64,
        h: f64,
        y_old: &[C64],
        y_new: &[C64],
        f_old: &[C64],
        f_new: &[C64],
        k: &mut [Vec<C64>],
        tmp: &mut [C64],
    ) -> Self
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y_old.len();
        for s in N_STAGES + 1..N_STAGES_EXTENDED {
            stage_input(y_old, k, A[s], h, tmp);
            let (_, tail) = k.split_at_mut(s);
            f(t_old + C[s] * h, tmp, &mut tail[0]);
        }
        let zero = vec![C64::new(0.0, 0.0); n];
        let mut coeffs: [Vec<C64>; 7] = std::array::from_fn(|_| zero.clone());
        for i in 0..n {
            let dy = y_new[i] - y_old[i];
            coeffs[0][i] = dy;
            coeffs[1][i] = f_old[i] * h - dy;
            coeffs[2][i] = dy * 2.0 - (f_new[i] + f_old[i]) * h;
            for (r, drow) in D.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (s, &d) in drow.iter().enumerate() {
                    if d != 0.0 {
                        acc += k[s][i] * d;
                    }
                }
                coeffs[3 + r][i] = acc * h;
            }
        }
        Self { t_old, h, y_old: y_old.to_vec(), coeffs }
    }

    fn eval(&self, t: f64) -> Vec<C64> {
        let x = (t - self.t_old) / self.h;
        let n = self.y_old.len();
        let mut acc = vec![C64::new(0.0, 0.0); n];
        for (i, c) in self.coeffs.iter().rev().enumerate() {
            let w = if i % 2 == 0 { x } else { 1.0 - x };
            for (a, ci) in acc.iter_mut().zip(c) {
                *a = (*a + ci) * w;
            }
        }
        acc.iter().zip(&self.y_old).map(|(a, y)| a + y).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(_t: f64, y: &[C64], dy: &mut [C64]) {
        // y0' = y1, y1' = -y0 in the real parts
        dy[0] = y[1];
        dy[1] = -y[0];
    }

    #[test]
    fn harmonic_oscillator_final_and_dense() {
        let y0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let ts: Vec<f64> = (0..=50).map(|i| i as f64 * 0.2).collect();
        let sol = dop853(harmonic, 0.0, 10.0, &y0, &ts, &OdeOptions::with_tol(1e-12)).unwrap();
        assert!((sol.y_final[0].re - 10f64.cos()).abs() < 1e-9);
        assert!((sol.y_final[1].re + 10f64.sin()).abs() < 1e-9);
        for (t, y) in ts.iter().zip(&sol.samples) {
            assert!((y[0].re - t.cos()).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn complex_phase_rotation() {
        let e = 3.7;
        let rhs = |_t: f64, y: &[C64], dy: &mut [C64]| dy[0] = C64::new(0.0, -e) * y[0];
        let y0 = [C64::new(1.0, 0.0)];
        let sol = dop853(rhs, 0.0, 2.0, &y0, &[], &OdeOptions::with_tol(1e-11)).unwrap();
        let exact = C64::new(0.0, -e * 2.0).exp();
        assert!((sol.y_final[0] - exact).norm() < 1e-9);
    }

    #[test]
    fn rejects_unsorted_samples() {
        let y0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        assert!(dop853(harmonic, 0.0, 1.0, &y0, &[0.5, 0.2], &OdeOptions::default()).is_err());
    }

    #[test]
    fn blow_up_reports_step_underflow() {
        // y' = y², y(0) = 1 blows up at t = 1.
        let rhs = |_t: f64, y: &[C64], dy: &mut [C64]| dy[0] = y[0] * y[0];
        let y0 = [C64::new(1.0, 0.0)];
        let err = dop853(rhs, 0.0, 2.0, &y0, &[], &OdeOptions::with_tol(1e-10)).unwrap_err();
        match err {
            Error::Integration { t, .. } => assert!((t - 1.0).abs() < 1e-6, "t = {t}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
