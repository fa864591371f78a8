// SPDX-License-Identifier: Apache-2.0

//! Command-line flags and their merge into a [`RunConfig`]. Flags always
//! override values read from `--config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rydgate::config::RunConfig;
use rydgate::optimize::{ObjectiveKind, RegimeKind};
use rydgate::pulses::{Protocol, PulseShape};
use rydgate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "rydgate", version, about = "Rydberg-ion CZ gate simulation and pulse optimization")]
pub struct Cli {
    /// TOML configuration, or a run-summary JSON to repeat a run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, short = 'o', global = true)]
    pub out: Option<PathBuf>,
    /// NDJSON log that optimizer results are appended to.
    #[arg(long, global = true)]
    pub log: Option<PathBuf>,
    /// Only print errors.
    #[arg(long, short = 'q', global = true)]
    pub quiet: bool,
    /// More diagnostic output on stderr (repeat for more).
    #[arg(long, short = 'v', global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the valence radial equation for one state.
    SolveRadial(StateArgs),
    /// Radial and angular multipole matrix elements between two states.
    MatrixElement(MatrixElementArgs),
    /// Coulomb-crystal equilibrium, phonon modes and distance scaling.
    Crystal(CrystalArgs),
    /// Pulse utilities.
    Pulse {
        #[command(subcommand)]
        action: PulseAction,
    },
    /// Simulate one gate and report its fidelity.
    Simulate(SimulateArgs),
    /// Optimize the pulse parameters of a protocol.
    Optimize(OptimizeArgs),
    /// Re-optimize a protocol with decay over a range of gate times.
    SweepDecay(SweepArgs),
    /// Regenerate the data behind a table or figure.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Subcommand)]
pub enum PulseAction {
    /// Write Ω_L(t) and Δ_L(t) of both ions as CSV.
    Dump(PulseDumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Conservative,
    Optimistic,
}

impl From<RegimeArg> for RegimeKind {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Conservative => RegimeKind::Conservative,
            RegimeArg::Optimistic => RegimeKind::Optimistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    #[value(name = "C", alias = "c")]
    C,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::A => Protocol::A,
            ProtocolArg::B => Protocol::B,
            ProtocolArg::C => Protocol::C,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    /// Fidelity after compensating single-qubit rotations.
    Sqr,
    /// Fidelity of the bare gate.
    Strict,
}

impl From<KindArg> for ObjectiveKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Sqr => ObjectiveKind::Sqr,
            KindArg::Strict => ObjectiveKind::Strict,
        }
    }
}

/// Fixed gate parameters (2π×MHz, µs) and decay.
#[derive(Debug, Default, Args)]
pub struct GateArgs {
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    /// Interaction strength V.
    #[arg(long)]
    pub v: Option<f64>,
    /// Microwave Rabi frequency.
    #[arg(long)]
    pub omega_mw: Option<f64>,
    /// Gate time in µs.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Rydberg decay rate in µs⁻¹.
    #[arg(long, conflicts_with = "lifetime")]
    pub decay_rate: Option<f64>,
    /// Rydberg lifetime in µs.
    #[arg(long)]
    pub lifetime: Option<f64>,
    /// Integrator tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Pulse parameters in 2π×MHz. Missing values fall back to the
/// configuration, then to the best known optimum of the regime.
#[derive(Debug, Default, Args)]
pub struct PulseArgs {
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolArg>,
    #[arg(long)]
    pub omega_0: Option<f64>,
    #[arg(long)]
    pub delta_0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub big_delta_0: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct OptimizerArgs {
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Comma-separated seeds; the best run is reported.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Comma-separated starting point, e.g. 9.8,37.44,-12.1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub warm_start: Option<Vec<f64>>,
    #[arg(long)]
    pub generations: Option<usize>,
    /// Population size per dimension.
    #[arg(long)]
    pub population_factor: Option<usize>,
    /// Integrator tolerance of objective evaluations.
    #[arg(long)]
    pub objective_tol: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub species: Option<String>,
    /// Use the bare Coulomb potential of the ion core instead of the model potential.
    #[arg(long)]
    pub hydrogenic: bool,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub l: Option<u32>,
    /// Total angular momentum, e.g. 0.5 or 1.5.
    #[arg(long)]
    pub j: Option<f64>,
    /// Radial grid points.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MatrixElementArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub n2: Option<u32>,
    #[arg(long)]
    pub l2: Option<u32>,
    #[arg(long)]
    pub j2: Option<f64>,
    /// Multipole rank (1 or 2).
    #[arg(long)]
    pub k: Option<u32>,
}

#[derive(Debug, Args)]
pub struct CrystalArgs {
    /// Number of ions.
    #[arg(long)]
    pub n: Option<usize>,
    /// Radial-to-axial anisotropy γ.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Axial trap frequency in 2π×MHz, for lengths in metres.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Also fit the gap scaling over N = lo..=hi.
    #[arg(long)]
    pub scaling: bool,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub scaling_range: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct PulseDumpArgs {
    #[command(flatten)]
    pub gate: GateArgs,
    #[command(flatten)]
    pub pulse: PulseArgs,
    #[arg(long, default_value_t = 501)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub gate: GateArgs,
    #[command(flatten)]
    pub pulse: PulseArgs,
    /// Trajectory samples.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub gate: GateArgs,
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolArg>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub gate: GateArgs,
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolArg>,
    /// Comma-separated gate times in µs.
    #[arg(long, value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Table1,
    #[value(name = "figA")]
    FigA,
    #[value(name = "figB")]
    FigB,
    FigAdiabatic,
    FigDecay,
    FigDistances,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Restrict to one regime.
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    /// Restrict to one protocol (table1).
    #[arg(long, value_enum)]
    pub protocol: Option<ProtocolArg>,
    /// Run the optimizer instead of evaluating the best known parameters.
    #[arg(long)]
    pub optimize: bool,
    /// Comma-separated gate times in µs (fig-decay).
    #[arg(long, value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

/// Loads `--config` (if any) and applies global flags.
pub fn base_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.out {
        cfg.output.dir = Some(dir.clone());
    }
    if let Some(log) = &cli.log {
        cfg.output.log = Some(log.clone());
    }
    Ok(cfg)
}

pub fn apply_gate(cfg: &mut RunConfig, g: &GateArgs) {
    if let Some(r) = g.regime {
        cfg.gate.regime = Some(r.into());
    }
    if g.v.is_some() {
        cfg.gate.v = g.v;
    }
    if g.omega_mw.is_some() {
        cfg.gate.omega_mw = g.omega_mw;
    }
    if g.tau.is_some() {
        cfg.gate.tau = g.tau;
    }
    if let Some(rate) = g.decay_rate {
        cfg.decay.rate = Some(rate);
        cfg.decay.lifetime = None;
    }
    if let Some(life) = g.lifetime {
        cfg.decay.lifetime = Some(life);
        cfg.decay.rate = None;
    }
    if let Some(tol) = g.tol {
        cfg.integrator.tol = tol;
    }
}

pub fn apply_protocol(cfg: &mut RunConfig, p: Option<ProtocolArg>) {
    if let Some(p) = p {
        let p: Protocol = p.into();
        cfg.protocol = Some(p);
        if cfg.pulse.is_some_and(|s| s.protocol() != p) {
            cfg.pulse = None;
        }
    }
}

/// Resolves the pulse from flags, the configuration and the regime's best
/// known optimum, in that order, and stores it in the configuration.
pub fn apply_pulse(cfg: &mut RunConfig, p: &PulseArgs) -> Result<()> {
    apply_protocol(cfg, p.protocol);
    let protocol = cfg.protocol()?;
    let regime = cfg.regime()?;
    let mut params = match &cfg.pulse {
        Some(s) if s.protocol() == protocol => s.params(),
        _ => regime.reference_params(protocol).unwrap_or_default(),
    };
    let overrides = [p.omega_0, p.delta_0, p.big_delta_0];
    if protocol == Protocol::C {
        if overrides.iter().any(Option::is_some) {
            return Err(Error::Config("protocol C fixes Ω₀ and δ₀; drop the pulse flags".into()));
        }
    } else {
        params.resize(protocol.dim(), f64::NAN);
        for (slot, value) in params.iter_mut().zip(overrides) {
            if let Some(v) = value {
                *slot = v;
            }
        }
        if params.iter().any(|v| v.is_nan()) {
            return Err(Error::Config(format!(
                "protocol {protocol:?} needs {} pulse parameters (--omega-0, --delta-0{})",
                protocol.dim(),
                if protocol == Protocol::B { ", --big-delta-0" } else { "" }
            )));
        }
    }
    cfg.pulse = Some(PulseShape::from_params(protocol, &params, regime.tau, regime.omega_mw)?);
    cfg.protocol = Some(protocol);
    Ok(())
}

pub fn apply_optimizer(cfg: &mut RunConfig, o: &OptimizerArgs) {
    if let Some(k) = o.kind {
        cfg.optimizer.kind = k.into();
    }
    if let Some(s) = &o.seeds {
        cfg.optimizer.seeds = s.clone();
    }
    if let Some(w) = &o.warm_start {
        cfg.optimizer.warm_start = Some(w.clone());
    }
    if let Some(g) = o.generations {
        cfg.optimizer.de.max_generations = g;
    }
    if let Some(p) = o.population_factor {
        cfg.optimizer.de.population_factor = p;
    }
    if let Some(t) = o.objective_tol {
        cfg.optimizer.tol = t;
    }
}

pub fn apply_state(cfg: &mut RunConfig, s: &StateArgs) {
    let a = &mut cfg.atomic;
    if let Some(sp) = &s.species {
        a.species = sp.clone();
    }
    if s.hydrogenic {
        a.hydrogenic = true;
    }
    if s.n.is_some() {
        a.n = s.n;
    }
    if s.l.is_some() {
        a.l = s.l;
    }
    if s.j.is_some() {
        a.j = s.j;
    }
    if let Some(p) = s.points {
        a.grid.points = p;
    }
}
