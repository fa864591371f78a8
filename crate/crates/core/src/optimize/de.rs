// SPDX-License-Identifier: Apache-2.0

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Box constraints, one `[lo, hi]` pair per dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds(pub Vec<(f64, f64)>);

impl Bounds {
    pub fn validate(&self) -> Result<()> {
        for (k, &(lo, hi)) in self.0.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::domain("optimize", format!("bound {k} = [{lo}, {hi}] is invalid")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn clip(&self, x: &mut [f64]) {
        for (v, &(lo, hi)) in x.iter_mut().zip(&self.0) {
            *v = v.clamp(lo, hi);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.0).all(|(v, &(lo, hi))| *v >= lo && *v <= hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeConfig {
    /// Population size per dimension.
    pub population_factor: usize,
    /// Differential weight F.
    pub mutation: f64,
    /// Crossover probability CR.
    pub crossover: f64,
    pub max_generations: usize,
    /// Stop when std(objective) ≤ tol · |mean(objective)|.
    pub tol: f64,
    pub seed: u64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self { population_factor: 15, mutation: 0.7, crossover: 0.9, max_generations: 300, tol: 1e-8, seed: 1 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeResult {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub generations: usize,
    pub evaluations: usize,
    /// Candidates whose objective was not finite.
    pub discarded: usize,
    /// Best objective after initialization and after each generation.
    pub history: Vec<f64>,
    pub converged: bool,
}

fn evaluate<F: Fn(&[f64]) -> f64 + Sync>(f: &F, xs: &[Vec<f64>]) -> (Vec<f64>, usize) {
    let raw: Vec<f64> = xs.par_iter().map(|x| f(x)).collect();
    let mut bad = 0;
    let vals = raw
        .into_iter()
        .zip(xs)
        .map(|(v, x)| {
            if v.is_finite() {
                v
            } else {
                bad += 1;
                log::warn!("objective returned {v} at {x:?}; candidate discarded");
                f64::INFINITY
            }
        })
        .collect();
    (vals, bad)
}

/// Minimizes `objective` over `bounds` with the rand/1/bin strategy.
///
/// The population is seeded by Latin hypercube sampling; `warm_start`, if
/// given, replaces member 0. Trial vectors of one generation are evaluated
/// in parallel and selected in index order, so the run depends only on the
/// seed.
pub fn differential_evolution<F>(
    objective: F,
    bounds: &Bounds,
    config: &DeConfig,
    warm_start: Option<&[f64]>,
) -> Result<DeResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    bounds.validate()?;
    let dim = bounds.dim();
    if dim == 0 {
        return Err(Error::domain("optimize", "nothing to optimize: zero-dimensional search space"));
    }
    if !(0.0..=2.0).contains(&config.mutation) || !(0.0..=1.0).contains(&config.crossover) {
        return Err(Error::domain("optimize", "mutation must lie in [0, 2] and crossover in [0, 1]"));
    }
    let np = (config.population_factor * dim).max(5);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Latin hypercube initialization
    let mut pop = vec![vec![0.0; dim]; np];
    for (d, &(lo, hi)) in bounds.0.iter().enumerate() {
        let mut strata: Vec<usize> = (0..np).collect();
        strata.shuffle(&mut rng);
        for (i, s) in strata.into_iter().enumerate() {
            let u = (s as f64 + rng.gen::<f64>()) / np as f64;
            pop[i][d] = lo + u * (hi - lo);
        }
    }
    if let Some(w) = warm_start {
        if w.len() != dim {
            return Err(Error::domain("optimize", format!("warm start has {} entries, expected {dim}", w.len())));
        }
        pop[0] = w.to_vec();
        bounds.clip(&mut pop[0]);
    }

    let (mut fit, mut discarded) = evaluate(&objective, &pop);
    let mut evaluations = np;
    let best_of = |fit: &[f64]| (0..fit.len()).min_by(|&a, &b| fit[a].total_cmp(&fit[b])).unwrap_or(0);
    let mut history = vec![fit[best_of(&fit)]];
    let mut generations = 0;
    let mut converged = false;

    while generations < config.max_generations {
        if spread_converged(&fit, config.tol) {
            converged = true;
            break;
        }
        let trials: Vec<Vec<f64>> = (0..np)
            .map(|i| {
                let mut pick = || loop {
                    let r = rng.gen_range(0..np);
                    if r != i {
                        break r;
                    }
                };
                let r1 = pick();
                let r2 = loop {
                    let r = pick();
                    if r != r1 {
                        break r;
                    }
                };
                let r3 = loop {
                    let r = pick();
                    if r != r1 && r != r2 {
                        break r;
                    }
                };
                let j_rand = rng.gen_range(0..dim);
                let mut trial = pop[i].clone();
                for d in 0..dim {
                    if d == j_rand || rng.gen::<f64>() < config.crossover {
                        trial[d] = pop[r1][d] + config.mutation * (pop[r2][d] - pop[r3][d]);
                    }
                }
                bounds.clip(&mut trial);
                trial
            })
            .collect();
        let (trial_fit, bad) = evaluate(&objective, &trials);
        evaluations += np;
        discarded += bad;
        for (i, (x, fx)) in trials.into_iter().zip(trial_fit).enumerate() {
            if fx <= fit[i] {
                pop[i] = x;
                fit[i] = fx;
            }
        }
        generations += 1;
        history.push(fit[best_of(&fit)]);
    }
    if !converged {
        converged = spread_converged(&fit, config.tol);
    }
    let b = best_of(&fit);
    if !fit[b].is_finite() {
        return Err(Error::convergence("optimize", "every candidate produced a non-finite objective"));
    }
    Ok(DeResult {
        best: pop[b].clone(),
        best_value: fit[b],
        generations,
        evaluations,
        discarded,
        history,
        converged,
    })
}

fn spread_converged(fit: &[f64], tol: f64) -> bool {
    if fit.iter().any(|f| !f.is_finite()) {
        return false;
    }
    let n = fit.len() as f64;
    let mean = fit.iter().sum::<f64>() / n;
    let var = fit.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() <= tol * mean.abs()
}
