// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::sync::Mutex;

use rydgate::optimize::{
    decay_sweep, differential_evolution, evaluate_gate, optimize_protocol, Bounds, DeConfig, ObjectiveKind,
    OptimizeRequest, Regime, RegimeKind,
};
use rydgate::pulses::Protocol;

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64 + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
}

#[test]
fn sphere_converges_to_origin() {
    let bounds = Bounds(vec![(-5.0, 5.0); 3]);
    let cfg = DeConfig { max_generations: 200, tol: 0.0, ..DeConfig::default() };
    let r = differential_evolution(|x: &[f64]| x.iter().map(|v| v * v).sum(), &bounds, &cfg, None).unwrap();
    assert!(r.best.iter().all(|v| v.abs() < 1e-6), "{:?}", r.best);
    assert!(r.generations <= 200);
}

/// Dense-grid search places the Rastrigin minimum at the origin; DE should
/// find the same basin from nearly every seed.
#[test]
fn rastrigin_global_minimum() {
    let n = 1025;
    let step = 10.24 / (n - 1) as f64;
    let mut grid_best = (f64::INFINITY, [0.0, 0.0]);
    for i in 0..n {
        for j in 0..n {
            let x = [-5.12 + i as f64 * step, -5.12 + j as f64 * step];
            let f = rastrigin(&x);
            if f < grid_best.0 {
                grid_best = (f, x);
            }
        }
    }
    assert!(grid_best.1.iter().all(|v| v.abs() < step));
    let bounds = Bounds(vec![(-5.12, 5.12); 2]);
    let hits = (1..=10)
        .filter(|&seed| {
            let cfg = DeConfig { seed, ..DeConfig::default() };
            let r = differential_evolution(rastrigin, &bounds, &cfg, None).unwrap();
            r.best_value < 1e-3
        })
        .count();
    assert!(hits >= 9, "{hits}/10 seeds found the global minimum");
}

#[test]
fn same_seed_same_run() {
    let bounds = Bounds(vec![(-5.12, 5.12); 2]);
    let cfg = DeConfig { seed: 42, max_generations: 50, ..DeConfig::default() };
    let a = differential_evolution(rastrigin, &bounds, &cfg, None).unwrap();
    let b = differential_evolution(rastrigin, &bounds, &cfg, None).unwrap();
    assert_eq!(a.best, b.best);
    assert_eq!(a.history, b.history);
    let c = differential_evolution(rastrigin, &bounds, &DeConfig { seed: 43, ..cfg }, None).unwrap();
    assert_ne!(a.history, c.history);
}

#[test]
fn candidates_respect_bounds_and_best_never_worsens() {
    let bounds = Bounds(vec![(-1.0, 2.0), (0.5, 0.7), (3.0, 3.0)]);
    let seen = Mutex::new(Vec::new());
    let objective = |x: &[f64]| {
        seen.lock().unwrap().push(x.to_vec());
        // optimum outside the box drives candidates onto the boundary
        (x[0] - 5.0).powi(2) + (x[1] + 1.0).powi(2) + x[2]
    };
    let cfg = DeConfig { max_generations: 60, ..DeConfig::default() };
    let r = differential_evolution(objective, &bounds, &cfg, None).unwrap();
    let seen = seen.into_inner().unwrap();
    assert_eq!(seen.len(), r.evaluations);
    assert!(seen.iter().all(|x| bounds.contains(x)));
    assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    assert!((r.best[0] - 2.0).abs() < 1e-9 && (r.best[1] - 0.5).abs() < 1e-9);
}

#[test]
fn non_finite_candidates_are_discarded() {
    let bounds = Bounds(vec![(-1.0, 1.0); 2]);
    let cfg = DeConfig { max_generations: 30, ..DeConfig::default() };
    let r = differential_evolution(|x: &[f64]| if x[0] > 0.0 { f64::NAN } else { x[0] * x[0] + x[1] * x[1] }, &bounds, &cfg, None)
        .unwrap();
    assert!(r.discarded > 0);
    assert!(r.best[0] <= 0.0 && r.best_value.is_finite());
    let all_bad = differential_evolution(|_: &[f64]| f64::NAN, &bounds, &cfg, None);
    assert!(all_bad.is_err());
}

#[test]
fn invalid_setups_are_rejected() {
    let cfg = DeConfig::default();
    assert!(differential_evolution(rastrigin, &Bounds(vec![]), &cfg, None).is_err());
    assert!(differential_evolution(rastrigin, &Bounds(vec![(1.0, 0.0)]), &cfg, None).is_err());
    assert!(differential_evolution(rastrigin, &Bounds(vec![(0.0, 1.0)]), &cfg, Some(&[0.1, 0.2])).is_err());
    let mut req = OptimizeRequest::new(Protocol::A, Regime::conservative(), ObjectiveKind::Sqr);
    req.seeds.clear();
    assert!(optimize_protocol(&req).is_err());
}

#[test]
fn protocol_c_is_evaluated_directly() {
    let req = OptimizeRequest::new(Protocol::C, Regime::conservative(), ObjectiveKind::Sqr);
    let r = optimize_protocol(&req).unwrap();
    assert!(r.params.is_empty() && r.generations == 0);
    assert!((r.fidelity - 0.8436).abs() < 5e-3, "{}", r.fidelity);
}

#[test]
fn regime_presets() {
    let c = Regime::conservative();
    assert_eq!((c.v, c.omega_mw, c.tau), (10.0, 100.0, 1.0));
    assert_eq!(c.bounds(Protocol::B).0, vec![(0.0, 10.0), (0.0, 100.0), (-100.0, 100.0)]);
    assert_eq!(c.bounds(Protocol::A).dim(), 2);
    let o = Regime::preset(RegimeKind::Optimistic).unwrap();
    assert_eq!((o.v, o.omega_mw, o.tau), (25.0, 250.0, 0.3));
    assert_eq!(o.bounds(Protocol::B).0[2], (-250.0, 250.0));
    assert!(Regime::preset(RegimeKind::Custom).is_err());
}

/// A warm start at the tabulated optimum is scored before any DE step.
#[test]
fn warm_start_is_scored_first() {
    let mut req = OptimizeRequest::new(Protocol::A, Regime::conservative(), ObjectiveKind::Sqr);
    req.seeds = vec![5];
    req.warm_start = Some(vec![7.78, 47.61]);
    req.de.max_generations = 3;
    let r = optimize_protocol(&req).unwrap();
    assert!((r.history[0] - 0.9681).abs() < 2e-3, "{}", r.history[0]);
    assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn result_reproduces_on_re_evaluation() {
    let mut req = OptimizeRequest::new(Protocol::A, Regime::conservative(), ObjectiveKind::Sqr);
    req.seeds = vec![1, 2];
    req.de.max_generations = 10;
    let r = optimize_protocol(&req).unwrap();
    assert!(req.regime.bounds(Protocol::A).contains(&r.params));
    let again = evaluate_gate(Protocol::A, &r.params, &req.regime, 0.0, 1e-10).unwrap();
    assert!((again.fidelity_sqr - r.fidelity).abs() < 1e-6);
    assert_eq!(r.outcome.fidelity_sqr, r.fidelity);
    let repeat = optimize_protocol(&req).unwrap();
    assert_eq!(repeat.params, r.params);
}

#[test]
fn sweep_without_decay_is_plain_optimization() {
    let mut req = OptimizeRequest::new(Protocol::A, Regime::conservative(), ObjectiveKind::Sqr);
    req.seeds = vec![3];
    req.de.max_generations = 8;
    let sweep = decay_sweep(&req, &[1.0]).unwrap();
    let direct = optimize_protocol(&req).unwrap();
    assert_eq!(sweep[0].result.params, direct.params);
    assert_eq!(sweep[0].estimate, 1.0);
    assert!((sweep[0].decay_free_fidelity - direct.fidelity).abs() < 1e-6);
}

#[test]
fn request_round_trips_through_json() {
    let mut req = OptimizeRequest::new(Protocol::B, Regime::optimistic(), ObjectiveKind::Strict);
    req.warm_start = Some(vec![1.0, 2.0, 3.0]);
    req.decay_rate = 0.128;
    let text = serde_json::to_string(&req).unwrap();
    assert_eq!(serde_json::from_str::<OptimizeRequest>(&text).unwrap(), req);
    assert!(serde_json::from_str::<OptimizeRequest>(&text.replace("\"tol\"", "\"tolerance\"")).is_err());
}
