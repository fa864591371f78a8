// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use rydgate::atomic::{
    angular_matrix_element, radial_matrix_element, solve_radial, AngularState, CorePotential, ElectronicState, HalfInt,
    SpeciesTable,
};
use rydgate::config::RunConfig;
use rydgate::crystal::{
    critical_anisotropy, distance_scaling_fit, equilibrium_positions, hessian, neighbour_gaps, phonon_modes,
    radial_instability_threshold, TrapParams,
};
use rydgate::dynamics::{evolve, write_trajectory_csv, EvolveOptions, GateModel};
use rydgate::gatemetrics::{decay_fidelity_estimate, GateOutcome};
use rydgate::model::StateBasis;
use rydgate::optimize::{decay_sweep, optimize_protocol, OptResult, OptimizeRequest, Regime, RegimeKind};
use rydgate::pulses::{write_pulse_csv, PulseShape};
use rydgate::units::{mhz_to_rad_per_s, BOHR_RADIUS, HARTREE_IN_INVERSE_CM};
use rydgate::{Error, Result};
use serde_json::json;

use crate::output::{append_ndjson, percent, to_value, Output, LOG_SCHEMA};

pub const DEFAULT_LIFETIME_US: f64 = 7.8;

fn need<T>(value: Option<T>, what: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing {what}")))
}

fn potential(cfg: &RunConfig) -> Result<CorePotential> {
    let table = SpeciesTable::builtin();
    let species = table
        .get(&cfg.atomic.species)
        .ok_or_else(|| Error::Config(format!("unknown species {:?}", cfg.atomic.species)))?;
    Ok(if cfg.atomic.hydrogenic {
        CorePotential::Hydrogenic { charge: f64::from(species.core_charge) }
    } else {
        CorePotential::model(species)
    })
}

fn state(n: Option<u32>, l: Option<u32>, j: Option<f64>, which: &str) -> Result<ElectronicState> {
    let n = need(n, &format!("{which} n"))?;
    let l = need(l, &format!("{which} l"))?;
    let j = match j {
        Some(j) => HalfInt::from_f64(j)?,
        None if l == 0 => HalfInt(1),
        None => return Err(Error::Config(format!("missing {which} j"))),
    };
    ElectronicState::new(n, l, j, j)
}

pub fn solve_radial_cmd(cfg: &RunConfig, out: &Output) -> Result<()> {
    let a = &cfg.atomic;
    let target = state(a.n, a.l, a.j, "state")?;
    let wf = solve_radial(&target, &potential(cfg)?, &a.grid)?;
    let name = format!("radial-{}.csv", target.label().replace('/', "_").replace(['(', ')', '+'], ""));
    let mut w = out.create(&name)?;
    wf.write_csv(&mut w)?;
    w.flush()?;
    out.say(format!(
        "{}: E = {:.9e} Hartree = {:.4} cm⁻¹, {} nodes -> {}",
        target.label(),
        wf.energy,
        wf.energy * HARTREE_IN_INVERSE_CM,
        wf.node_count(),
        out.path(&name).display()
    ));
    out.summary(
        "solve-radial",
        cfg,
        json!({
            "state": target.label(),
            "energy_hartree": wf.energy,
            "energy_inverse_cm": wf.energy * HARTREE_IN_INVERSE_CM,
            "nodes": wf.node_count(),
            "norm": wf.norm(),
            "points": wf.grid.len(),
            "r_max_bohr": wf.grid.last(),
            "wavefunction_csv": name,
        }),
    )?;
    Ok(())
}

pub fn matrix_element_cmd(cfg: &RunConfig, out: &Output) -> Result<()> {
    let a = &cfg.atomic;
    let ket = state(a.n, a.l, a.j, "first state")?;
    let bra = state(a.n2, a.l2, a.j2, "second state")?;
    if !(1..=2).contains(&a.k) {
        return Err(Error::Config(format!("multipole rank k = {} must be 1 or 2", a.k)));
    }
    let k = a.k as i32;
    let radial = radial_matrix_element(&bra, &ket, k, &potential(cfg)?, &a.grid)?;
    let mut angular = Vec::new();
    for mj2 in (-ket.j.0..=ket.j.0).step_by(2) {
        for mjp2 in (-bra.j.0..=bra.j.0).step_by(2) {
            let mk2 = mjp2 - mj2;
            if mk2 % 2 != 0 || mk2.abs() > 2 * k {
                continue;
            }
            let b = AngularState { l: bra.l, j: bra.j, mj: HalfInt(mjp2) };
            let kt = AngularState { l: ket.l, j: ket.j, mj: HalfInt(mj2) };
            let v = angular_matrix_element(&b, a.k, mk2 / 2, &kt);
            if v != 0.0 {
                angular.push(json!({ "mj_bra": mjp2 as f64 / 2.0, "mk": mk2 / 2, "mj_ket": mj2 as f64 / 2.0, "value": v }));
            }
        }
    }
    let si = radial * BOHR_RADIUS.powi(k);
    out.say(format!(
        "⟨{}|r^{k}|{}⟩ = {radial:.6} a0^{k} = {si:.6e} m^{k}; {} non-zero angular elements",
        bra.label(),
        ket.label(),
        angular.len()
    ));
    out.summary(
        "matrix-element",
        cfg,
        json!({
            "bra": bra.label(),
            "ket": ket.label(),
            "k": k,
            "radial_bohr": radial,
            "radial_si": si,
            "angular": angular,
        }),
    )?;
    Ok(())
}

pub fn crystal_cmd(cfg: &RunConfig, out: &Output) -> Result<()> {
    let c = &cfg.crystal;
    let z = equilibrium_positions(c.n)?;
    let k = hessian(&z)?;
    let modes = phonon_modes(&k, c.gamma.unwrap_or(0.0))?;
    let threshold = radial_instability_threshold(&modes);
    let rows: Vec<Vec<f64>> = k.row_iter().map(|r| r.iter().copied().collect()).collect();
    let vectors: Vec<Vec<f64>> = modes.vectors.column_iter().map(|v| v.iter().copied().collect()).collect();
    let mut report = json!({
        "schema": "rydgate-crystal v1",
        "n": c.n,
        "positions": z,
        "gaps": neighbour_gaps(&z),
        "hessian": rows,
        "gamma_sq": modes.gamma_sq,
        "axial": modes.axial,
        "mode_vectors": vectors,
        "radial_instability_threshold": threshold,
        "critical_anisotropy_estimate": critical_anisotropy(c.n),
    });
    if let Some(gamma) = c.gamma {
        report["gamma"] = json!(gamma);
        report["radial_sq"] = json!(modes.radial_sq);
        report["unstable_radial_modes"] = json!(modes.unstable_radial());
        report["linear_chain"] = json!(gamma > threshold);
    }
    if let Some(omega) = c.omega {
        let species = SpeciesTable::builtin()
            .get(&cfg.atomic.species)
            .cloned()
            .ok_or_else(|| Error::Config(format!("unknown species {:?}", cfg.atomic.species)))?;
        let trap = TrapParams::new(mhz_to_rad_per_s(omega), c.gamma.unwrap_or(threshold.max(1.0)), c.n, species.mass_kg())?;
        let length = trap.length_scale();
        report["length_scale_m"] = json!(length);
        report["oscillation_length_m"] = json!(trap.oscillation_length());
        report["positions_m"] = json!(z.iter().map(|x| x * length).collect::<Vec<_>>());
    }
    if c.scaling {
        let (lo, hi) = c.scaling_range;
        let fit = distance_scaling_fit(lo, hi)?;
        let mut w = out.create("crystal-gaps.csv")?;
        writeln!(w, "# rydgate gaps v1: nearest-neighbour gaps in units of the trap length")?;
        writeln!(w, "n,min,mean,max")?;
        for s in &fit.samples {
            writeln!(w, "{},{:.12e},{:.12e},{:.12e}", s.n, s.min, s.mean, s.max)?;
        }
        w.flush()?;
        for (name, f) in [("min", fit.min), ("mean", fit.mean), ("max", fit.max)] {
            out.say(format!("{name:>4} gap ≈ {:.3}/N^{:.3} {:+.3}  (rms {:.1e})", f.a, f.b, f.c, f.rms));
        }
        report["scaling"] = json!({ "range": [lo, hi], "min": fit.min, "mean": fit.mean, "max": fit.max });
    }
    let path = out.json("crystal.json", &report)?;
    out.say(format!(
        "N = {}: γ_p² = {:?}, radial instability below γ = {:.6} -> {}",
        c.n,
        modes.gamma_sq.iter().map(|g| (g * 1e6).round() / 1e6).collect::<Vec<_>>(),
        threshold,
        path.display()
    ));
    out.summary("crystal", cfg, report)?;
    Ok(())
}

pub fn pulse_dump_cmd(cfg: &RunConfig, out: &Output, points: usize) -> Result<()> {
    let pulse = need(cfg.pulse, "pulse")?;
    let name = format!("pulse-{:?}.csv", pulse.protocol());
    let mut w = out.create(&name)?;
    write_pulse_csv(&pulse, points, &mut w)?;
    w.flush()?;
    out.say(format!("pulse {:?} ({} points) -> {}", pulse.protocol(), points, out.path(&name).display()));
    Ok(())
}

/// Full gate simulation with the decay-free decay estimate when γ_R > 0.
pub struct GateRun {
    pub outcome: GateOutcome,
    pub trajectory: rydgate::dynamics::Trajectory,
    pub estimate: Option<f64>,
}

pub fn run_gate(regime: &Regime, pulse: PulseShape, decay_rate: f64, opts: &EvolveOptions) -> Result<GateRun> {
    let model = GateModel::new(regime.gate_params(decay_rate)?, pulse)?;
    let trajectory = evolve(&model, &StateBasis::initial_state(), regime.tau, opts)?;
    let outcome = GateOutcome::from_state(&trajectory.final_state)?;
    let estimate = if decay_rate > 0.0 {
        let free = GateModel::new(regime.gate_params(0.0)?, pulse)?;
        let samples = opts.samples.max(2);
        let t = evolve(&free, &StateBasis::initial_state(), regime.tau, &EvolveOptions { samples, ..*opts })?;
        Some(decay_fidelity_estimate(&t, decay_rate)?)
    } else {
        None
    };
    Ok(GateRun { outcome, trajectory, estimate })
}

pub fn outcome_line(o: &GateOutcome) -> String {
    format!(
        "F_sqr = {}  F = {}  p̄* = {:.2e}  φ̄* = {:.2e}  φ* = {:.6}",
        percent(o.fidelity_sqr),
        percent(o.fidelity_plain),
        o.population_error,
        o.phase_error,
        o.entangling_phase
    )
}

pub fn simulate_cmd(cfg: &RunConfig, out: &Output) -> Result<()> {
    let regime = cfg.regime()?;
    let pulse = need(cfg.pulse, "pulse")?;
    let decay = cfg.decay.rate()?;
    let opts = EvolveOptions { tol: cfg.integrator.tol, samples: cfg.integrator.samples, ..EvolveOptions::default() };
    let run = run_gate(&regime, pulse, decay, &opts)?;
    let mut csv = None;
    if !run.trajectory.times.is_empty() {
        let mut w = out.create("simulate-trajectory.csv")?;
        write_trajectory_csv(&run.trajectory, &mut w)?;
        w.flush()?;
        csv = Some("simulate-trajectory.csv");
    }
    out.say(format!("{:?} {:?}: {}", pulse.protocol(), regime.kind, outcome_line(&run.outcome)));
    if let Some(e) = run.estimate {
        out.say(format!("decay estimate from the decay-free trajectory: {}", percent(e)));
    }
    out.summary(
        "simulate",
        cfg,
        json!({
            "protocol": pulse.protocol(),
            "params": pulse.params(),
            "decay_rate": decay,
            "outcome": run.outcome,
            "decay_estimate": run.estimate,
            "steps_accepted": run.trajectory.stats.accepted,
            "steps_rejected": run.trajectory.stats.rejected,
            "trajectory_csv": csv,
        }),
    )?;
    Ok(())
}

pub fn optimize_request(cfg: &RunConfig, regime: Regime) -> Result<OptimizeRequest> {
    Ok(OptimizeRequest {
        protocol: cfg.protocol()?,
        regime,
        kind: cfg.optimizer.kind,
        decay_rate: cfg.decay.rate()?,
        seeds: cfg.optimizer.seeds.clone(),
        de: cfg.optimizer.de,
        warm_start: cfg.optimizer.warm_start.clone(),
        tol: cfg.optimizer.tol,
    })
}

fn log_path(cfg: &RunConfig, out: &Output) -> std::path::PathBuf {
    cfg.output.log.clone().unwrap_or_else(|| out.path("optimize-log.ndjson"))
}

pub fn log_result(cfg: &RunConfig, out: &Output, command: &str, req: &OptimizeRequest, result: &OptResult) -> Result<()> {
    let record = json!({
        "schema": LOG_SCHEMA,
        "command": command,
        "config": cfg,
        "request": req,
        "result": result,
    });
    append_ndjson(&log_path(cfg, out), &record)
}

pub fn result_line(r: &OptResult) -> String {
    format!(
        "{:?} {:?} τ = {} µs: F = {} at {:?} (seed {}, {} generations, {:.1} s)",
        r.protocol,
        r.regime.kind,
        r.regime.tau,
        percent(r.fidelity),
        r.params.iter().map(|x| (x * 100.0).round() / 100.0).collect::<Vec<_>>(),
        r.seed,
        r.generations,
        r.wall_time_s
    )
}

pub fn optimize_cmd(cfg: &RunConfig, out: &Output) -> Result<()> {
    let req = optimize_request(cfg, cfg.regime()?)?;
    let result = optimize_protocol(&req)?;
    log_result(cfg, out, "optimize", &req, &result)?;
    let mut w = out.create("optimize-history.csv")?;
    writeln!(w, "# rydgate optimize-history v1: best fidelity per generation, seed {}", result.seed)?;
    writeln!(w, "generation,fidelity")?;
    for (g, f) in result.history.iter().enumerate() {
        writeln!(w, "{g},{f:.15e}")?;
    }
    w.flush()?;
    out.say(result_line(&result));
    out.say(outcome_line(&result.outcome));
    out.summary("optimize", cfg, &result)?;
    Ok(())
}

pub fn default_taus(kind: RegimeKind) -> Vec<f64> {
    match kind {
        RegimeKind::Optimistic => vec![0.1, 0.15, 0.2, 0.25, 0.3],
        _ => vec![0.4, 0.6, 0.8, 1.0, 1.2],
    }
}

/// Fills in the decay lifetime and τ grid used by `sweep-decay` so that the
/// summary records them explicitly.
pub fn resolve_sweep(cfg: &mut RunConfig) -> Result<()> {
    if cfg.decay.rate.is_none() && cfg.decay.lifetime.is_none() {
        cfg.decay.lifetime = Some(DEFAULT_LIFETIME_US);
    }
    if cfg.sweep.taus.is_empty() {
        cfg.sweep.taus = default_taus(cfg.regime()?.kind);
    }
    Ok(())
}

pub fn write_sweep_csv(out: &Output, name: &str, points: &[rydgate::optimize::SweepPoint]) -> Result<()> {
    let mut w = out.create(name)?;
    writeln!(w, "# rydgate sweep-decay v1: fidelities in [0, 1], parameters in 2π×MHz")?;
    writeln!(w, "tau_us,fidelity,decay_estimate,decay_free_fidelity,omega_0,delta_0,big_delta_0,seed")?;
    for p in points {
        let x = &p.result.params;
        let get = |i: usize| x.get(i).map(|v| format!("{v:.9}")).unwrap_or_default();
        writeln!(
            w,
            "{},{:.12e},{:.12e},{:.12e},{},{},{},{}",
            p.tau,
            p.result.fidelity,
            p.estimate,
            p.decay_free_fidelity,
            get(0),
            get(1),
            get(2),
            p.result.seed
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn sweep_decay_cmd(cfg: &RunConfig, out: &Output) -> Result<()> {
    let req = optimize_request(cfg, cfg.regime()?)?;
    let points = decay_sweep(&req, &cfg.sweep.taus)?;
    for p in &points {
        log_result(cfg, out, "sweep-decay", &req, &p.result)?;
        out.say(format!(
            "τ = {:.3} µs: F = {}  estimate {}  (decay-free {})",
            p.tau,
            percent(p.result.fidelity),
            percent(p.estimate),
            percent(p.decay_free_fidelity)
        ));
    }
    write_sweep_csv(out, "sweep-decay.csv", &points)?;
    out.summary("sweep-decay", cfg, to_value(&points)?)?;
    Ok(())
}
