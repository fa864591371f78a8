// SPDX-License-Identifier: Apache-2.0

//! `rydgate` command-line front end.
//!
//! Exit status: 0 success, 2 invalid configuration or usage, 3 domain
//! error, 4 convergence failure, 5 integration failure, 6 eigenstate
//! tracking failure, 7 I/O error.

mod args;
mod commands;
mod output;
mod reproduce;

use std::process::ExitCode;

use clap::Parser;
use rydgate::config::RunConfig;
use rydgate::{Error, Result};

use args::{Cli, Command, PulseAction};
use output::Output;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Domain { .. } => 3,
        Error::Convergence { .. } => 4,
        Error::Integration { .. } => 5,
        Error::Tracking { .. } => 6,
        Error::Io(_) => 7,
    }
}

fn set_command(cfg: &mut RunConfig, name: &str) {
    if let Some(prev) = cfg.command.as_deref().filter(|c| *c != name) {
        log::warn!("configuration was written for `{prev}`, running `{name}`");
    }
    cfg.command = Some(name.to_string());
}

fn run(cli: &Cli) -> Result<()> {
    let mut cfg = args::base_config(cli)?;
    match &cli.command {
        Command::SolveRadial(s) => {
            set_command(&mut cfg, "solve-radial");
            args::apply_state(&mut cfg, s);
            cfg.validate()?;
            commands::solve_radial_cmd(&cfg, &Output::new(&cfg, cli.quiet)?)
        }
        Command::MatrixElement(m) => {
            set_command(&mut cfg, "matrix-element");
            args::apply_state(&mut cfg, &m.state);
            let a = &mut cfg.atomic;
            a.n2 = m.n2.or(a.n2);
            a.l2 = m.l2.or(a.l2);
            a.j2 = m.j2.or(a.j2);
            a.k = m.k.unwrap_or(a.k);
            cfg.validate()?;
            commands::matrix_element_cmd(&cfg, &Output::new(&cfg, cli.quiet)?)
        }
        Command::Crystal(c) => {
            set_command(&mut cfg, "crystal");
            let s = &mut cfg.crystal;
            s.n = c.n.unwrap_or(s.n);
            s.gamma = c.gamma.or(s.gamma);
            s.omega = c.omega.or(s.omega);
            s.scaling |= c.scaling || c.scaling_range.is_some();
            if let Some(r) = &c.scaling_range {
                s.scaling_range = (r[0], r[1]);
            }
            cfg.validate()?;
            commands::crystal_cmd(&cfg, &Output::new(&cfg, cli.quiet)?)
        }
        Command::Pulse { action: PulseAction::Dump(d) } => {
            set_command(&mut cfg, "pulse-dump");
            args::apply_gate(&mut cfg, &d.gate);
            args::apply_pulse(&mut cfg, &d.pulse)?;
            cfg.validate()?;
            commands::pulse_dump_cmd(&cfg, &Output::new(&cfg, cli.quiet)?, d.points)
        }
        Command::Simulate(s) => {
            set_command(&mut cfg, "simulate");
            args::apply_gate(&mut cfg, &s.gate);
            args::apply_pulse(&mut cfg, &s.pulse)?;
            if let Some(n) = s.samples {
                cfg.integrator.samples = n;
            }
            cfg.validate()?;
            commands::simulate_cmd(&cfg, &Output::new(&cfg, cli.quiet)?)
        }
        Command::Optimize(o) => {
            set_command(&mut cfg, "optimize");
            args::apply_gate(&mut cfg, &o.gate);
            args::apply_protocol(&mut cfg, o.protocol);
            args::apply_optimizer(&mut cfg, &o.optimizer);
            cfg.validate()?;
            commands::optimize_cmd(&cfg, &Output::new(&cfg, cli.quiet)?)
        }
        Command::SweepDecay(s) => {
            set_command(&mut cfg, "sweep-decay");
            args::apply_gate(&mut cfg, &s.gate);
            args::apply_protocol(&mut cfg, s.protocol);
            if let Some(t) = &s.taus {
                cfg.sweep.taus = t.clone();
            }
            args::apply_optimizer(&mut cfg, &s.optimizer);
            commands::resolve_sweep(&mut cfg)?;
            cfg.validate()?;
            commands::sweep_decay_cmd(&cfg, &Output::new(&cfg, cli.quiet)?)
        }
        Command::Reproduce(r) => {
            set_command(&mut cfg, "reproduce");
            if let Some(reg) = r.regime {
                cfg.gate.regime = Some(reg.into());
            }
            args::apply_protocol(&mut cfg, r.protocol);
            if let Some(t) = &r.taus {
                cfg.sweep.taus = t.clone();
            }
            args::apply_optimizer(&mut cfg, &r.optimizer);
            cfg.validate()?;
            reproduce::run(r.target, &cfg, &Output::new(&cfg, cli.quiet)?, r.optimize)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => "error",
        (false, 0) => "warn",
        (false, 1) => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).format_timestamp(None).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error {}: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}
