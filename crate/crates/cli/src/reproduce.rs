// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use rydgate::config::RunConfig;
use rydgate::crystal::distance_scaling_fit;
use rydgate::dynamics::{
    adiabatic_phase_estimate, evolve, evolve_reduced, write_trajectory_csv, EvolveOptions, GateModel, ReducedModel,
    ReducedSector,
};
use rydgate::model::{DressedRatios, Level, StateBasis};
use rydgate::optimize::{decay_sweep, optimize_protocol, Regime, RegimeKind};
use rydgate::pulses::{Protocol, PulseShape};
use rydgate::{Error, Result};
use serde_json::{json, Value};

use crate::args::Target;
use crate::commands::{
    default_taus, log_result, optimize_request, outcome_line, result_line, run_gate, write_sweep_csv, DEFAULT_LIFETIME_US,
};
use crate::output::{percent, to_value, Output};

fn regimes(cfg: &RunConfig) -> Result<Vec<Regime>> {
    match cfg.gate.regime {
        Some(RegimeKind::Custom) => Ok(vec![cfg.regime()?]),
        Some(kind) => Ok(vec![Regime::preset(kind)?]),
        None if cfg.gate.v.is_some() => Ok(vec![cfg.regime()?]),
        None => Ok(vec![Regime::conservative(), Regime::optimistic()]),
    }
}

fn name(kind: RegimeKind) -> &'static str {
    match kind {
        RegimeKind::Conservative => "conservative",
        RegimeKind::Optimistic => "optimistic",
        RegimeKind::Custom => "custom",
    }
}

/// Pulse for a protocol in a regime: the best known optimum, or a fresh
/// optimization when `optimize` is set. Returns the pulse and an optional
/// optimizer record.
fn gate_pulse(cfg: &RunConfig, out: &Output, regime: Regime, protocol: Protocol, optimize: bool) -> Result<(PulseShape, Option<Value>)> {
    if optimize && protocol != Protocol::C {
        let mut c = cfg.clone();
        c.protocol = Some(protocol);
        c.pulse = None;
        let req = optimize_request(&c, regime)?;
        let r = optimize_protocol(&req)?;
        log_result(&c, out, "reproduce", &req, &r)?;
        out.say(result_line(&r));
        let pulse = PulseShape::from_params(protocol, &r.params, regime.tau, regime.omega_mw)?;
        return Ok((pulse, Some(to_value(&r)?)));
    }
    let params = regime.reference_params(protocol).ok_or_else(|| {
        Error::Config(format!("no reference parameters for protocol {protocol:?} in this regime; use --optimize"))
    })?;
    Ok((PulseShape::from_params(protocol, &params, regime.tau, regime.omega_mw)?, None))
}

fn options(cfg: &RunConfig, samples: usize) -> EvolveOptions {
    EvolveOptions { tol: cfg.integrator.tol, samples, ..EvolveOptions::default() }
}

pub fn run(target: Target, cfg: &RunConfig, out: &Output, optimize: bool) -> Result<()> {
    match target {
        Target::Table1 => table1(cfg, out, optimize),
        Target::FigA => gate_figure(cfg, out, Protocol::A, "figA", optimize),
        Target::FigB => gate_figure(cfg, out, Protocol::B, "figB", optimize),
        Target::FigAdiabatic => adiabatic_figure(cfg, out),
        Target::FigDecay => decay_figure(cfg, out),
        Target::FigDistances => distances_figure(cfg, out),
    }
}

fn table1(cfg: &RunConfig, out: &Output, optimize: bool) -> Result<()> {
    let protocols = match cfg.protocol {
        Some(p) => vec![p],
        None => vec![Protocol::A, Protocol::B, Protocol::C],
    };
    let decay = cfg.decay.rate()?;
    let mut rows = Vec::new();
    let mut w = out.create("table1.csv")?;
    writeln!(w, "# rydgate table1 v1: parameters in 2π×MHz, fidelities in [0, 1]")?;
    writeln!(w, "regime,protocol,omega_0,delta_0,big_delta_0,fidelity_sqr,fidelity,population_error,phase_error,reference")?;
    for regime in regimes(cfg)? {
        for &protocol in &protocols {
            let (pulse, opt) = gate_pulse(cfg, out, regime, protocol, optimize)?;
            let run = run_gate(&regime, pulse, decay, &options(cfg, 0))?;
            let o = run.outcome;
            let reference = regime.reference_fidelity(protocol);
            out.say(format!(
                "{:>12} {:?}: F_sqr = {}  p̄* = {:.1e}  φ̄* = {:.1e}{}",
                name(regime.kind),
                protocol,
                percent(o.fidelity_sqr),
                o.population_error,
                o.phase_error,
                reference.map(|r| format!("  (reference {:.2} %)", 100.0 * r)).unwrap_or_default()
            ));
            let p = [pulse.omega_0(), pulse.delta_0(), pulse.params().get(2).copied().unwrap_or(f64::NAN)];
            writeln!(
                w,
                "{},{:?},{:.6},{:.6},{},{:.12e},{:.12e},{:.6e},{:.6e},{}",
                name(regime.kind),
                protocol,
                p[0],
                p[1],
                if p[2].is_nan() { String::new() } else { format!("{:.6}", p[2]) },
                o.fidelity_sqr,
                o.fidelity_plain,
                o.population_error,
                o.phase_error,
                reference.map(|r| r.to_string()).unwrap_or_default()
            )?;
            rows.push(json!({
                "regime": regime,
                "protocol": protocol,
                "params": pulse.params(),
                "omega_0": p[0],
                "delta_0": p[1],
                "outcome": o,
                "decay_rate": decay,
                "reference_fidelity": reference,
                "optimization": opt,
            }));
        }
    }
    w.flush()?;
    out.summary("table1", cfg, rows)?;
    Ok(())
}

fn gate_figure(cfg: &RunConfig, out: &Output, protocol: Protocol, stem: &str, optimize: bool) -> Result<()> {
    let decay = cfg.decay.rate()?;
    let mut rows = Vec::new();
    for regime in regimes(cfg)? {
        let (pulse, opt) = gate_pulse(cfg, out, regime, protocol, optimize)?;
        let run = run_gate(&regime, pulse, decay, &options(cfg, cfg.integrator.samples.max(2)))?;
        let file = format!("{stem}-{}.csv", name(regime.kind));
        let mut w = out.create(&file)?;
        write_trajectory_csv(&run.trajectory, &mut w)?;
        w.flush()?;
        out.say(format!("{:>12} {:?}: {} -> {}", name(regime.kind), protocol, outcome_line(&run.outcome), out.path(&file).display()));
        rows.push(json!({
            "regime": regime,
            "protocol": protocol,
            "params": pulse.params(),
            "outcome": run.outcome,
            "trajectory_csv": file,
            "optimization": opt,
        }));
    }
    out.summary(stem, cfg, rows)?;
    Ok(())
}

fn adiabatic_figure(cfg: &RunConfig, out: &Output) -> Result<()> {
    use Level::*;
    let regime = match cfg.gate.regime {
        None if cfg.gate.v.is_none() => Regime::conservative(),
        _ => cfg.regime()?,
    };
    let (pulse, _) = gate_pulse(cfg, out, regime, Protocol::B, false)?;
    let params = regime.gate_params(0.0)?;
    let model = GateModel::new(params, pulse)?;
    let opts = options(cfg, cfg.integrator.samples.max(2));
    let full = evolve(&model, &StateBasis::initial_state(), regime.tau, &opts)?;
    let r11 = evolve_reduced(&model, ReducedSector::Eleven, &opts)?;
    let r10 = evolve_reduced(&model, ReducedSector::Ten, &opts)?;
    let p11 = ReducedModel { model: &model, sector: ReducedSector::Eleven };
    let p10 = ReducedModel { model: &model, sector: ReducedSector::Ten };
    let idx = StateBasis::index;
    let h = std::f64::consts::FRAC_1_SQRT_2;

    let mut w = out.create("fig-adiabatic.csv")?;
    writeln!(w, "# rydgate adiabatic v1: populations from the four-state superposition; ratios ε±, δ, η relative to Δ_L")?;
    writeln!(
        w,
        "t_us,full_mm,full_sminus,full_11,reduced_mm,reduced_sminus,reduced_11,full_m0,full_10,reduced_m0,reduced_10,\
         eliminated_pp,eliminated_sr,eliminated_splus,eliminated_p0,eps_plus,eps_minus,delta,eta"
    )?;
    let mut max_dev: f64 = 0.0;
    let mut max_eliminated: f64 = 0.0;
    for k in 0..full.times.len() {
        let t = full.times[k];
        let psi = &full.states[k];
        let f11 = p11.project_full(psi);
        let f10 = p10.project_full(psi);
        let red11 = &r11.populations[k];
        let red10 = &r10.populations[k];
        for (a, b) in f11.iter().zip(red11.iter()).chain(f10.iter().zip(red10.iter())) {
            max_dev = max_dev.max((a - b).abs());
        }
        let pp = psi[idx(Plus, Plus)].norm_sqr();
        let sr = ((psi[idx(Plus, Minus)] + psi[idx(Minus, Plus)]) * h).norm_sqr();
        let sp = ((psi[idx(Plus, One)] + psi[idx(One, Plus)]) * h).norm_sqr();
        let p0 = psi[idx(Plus, Zero)].norm_sqr();
        max_eliminated = max_eliminated.max(pp.max(sr).max(sp).max(p0));
        let [d, _] = pulse.drives(t);
        let ratios = DressedRatios::new(d.rabi, d.detuning, params.omega_mw, params.v).ok();
        let fmt = |x: Option<f64>| x.map(|v| format!("{v:.9e}")).unwrap_or_default();
        writeln!(
            w,
            "{t:.9},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{pp:.9e},{sr:.9e},{sp:.9e},{p0:.9e},{},{},{},{}",
            f11[0],
            f11[1],
            f11[2],
            red11[0],
            red11[1],
            red11[2],
            f10[0],
            f10[1],
            red10[0],
            red10[1],
            fmt(ratios.map(|r| r.eps_plus)),
            fmt(ratios.map(|r| r.eps_minus)),
            fmt(ratios.map(|r| r.delta)),
            fmt(ratios.map(|r| r.eta)),
        )?;
    }
    w.flush()?;
    let estimate = adiabatic_phase_estimate(&model, regime.tau, 401)?;
    let simulated = full.entangling_phase_series().last().copied().unwrap_or(f64::NAN);
    out.say(format!(
        "reduced vs full populations: max deviation {max_dev:.2e}; eliminated states ≤ {max_eliminated:.2e}"
    ));
    out.say(format!("φ*: adiabatic estimate {:.6}, simulated {simulated:.6}", estimate.entangling_phase));
    out.summary(
        "fig-adiabatic",
        cfg,
        json!({
            "regime": regime,
            "params": pulse.params(),
            "max_population_deviation": max_dev,
            "max_eliminated_population": max_eliminated,
            "adiabatic_entangling_phase": estimate.entangling_phase,
            "simulated_entangling_phase": simulated,
            "csv": "fig-adiabatic.csv",
        }),
    )?;
    Ok(())
}

fn decay_figure(cfg: &RunConfig, out: &Output) -> Result<()> {
    let mut c = cfg.clone();
    if c.decay.rate.is_none() && c.decay.lifetime.is_none() {
        c.decay.lifetime = Some(DEFAULT_LIFETIME_US);
    }
    c.protocol = Some(Protocol::B);
    c.pulse = None;
    let mut all = Vec::new();
    for regime in regimes(&c)? {
        let taus = if c.sweep.taus.is_empty() { default_taus(regime.kind) } else { c.sweep.taus.clone() };
        let req = optimize_request(&c, regime)?;
        let points = decay_sweep(&req, &taus)?;
        for p in &points {
            log_result(&c, out, "reproduce", &req, &p.result)?;
            out.say(format!(
                "{:>12} τ = {:.3} µs: F = {}  estimate {}",
                name(regime.kind),
                p.tau,
                percent(p.result.fidelity),
                percent(p.estimate)
            ));
        }
        write_sweep_csv(out, &format!("fig-decay-{}.csv", name(regime.kind)), &points)?;
        all.push(json!({ "regime": regime, "points": points }));
    }
    out.summary("fig-decay", &c, all)?;
    Ok(())
}

fn distances_figure(cfg: &RunConfig, out: &Output) -> Result<()> {
    let (lo, hi) = cfg.crystal.scaling_range;
    let fit = distance_scaling_fit(lo, hi)?;
    let mut w = out.create("fig-distances.csv")?;
    writeln!(w, "# rydgate gaps v1: nearest-neighbour gaps in units of the trap length")?;
    writeln!(w, "n,min,mean,max,fit_min,fit_mean,fit_max")?;
    for s in &fit.samples {
        let n = s.n as f64;
        writeln!(
            w,
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            s.n,
            s.min,
            s.mean,
            s.max,
            fit.min.eval(n),
            fit.mean.eval(n),
            fit.max.eval(n)
        )?;
    }
    w.flush()?;
    for (label, f) in [("min", fit.min), ("mean", fit.mean), ("max", fit.max)] {
        out.say(format!("{label:>4} gap ≈ {:.3}/N^{:.3} {:+.3}  (N = {lo}..{hi}, rms {:.1e})", f.a, f.b, f.c, f.rms));
    }
    out.summary(
        "fig-distances",
        cfg,
        json!({ "range": [lo, hi], "min": fit.min, "mean": fit.mean, "max": fit.max, "csv": "fig-distances.csv" }),
    )?;
    Ok(())
}
