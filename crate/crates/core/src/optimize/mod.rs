// SPDX-License-Identifier: Apache-2.0

//! Differential evolution and the protocol/regime optimization workflows.

mod de;
mod workflow;

pub use de::{differential_evolution, Bounds, DeConfig, DeResult};
pub use workflow::{
    decay_sweep, evaluate_gate, optimize_protocol, GateObjective, ObjectiveKind, OptResult, OptimizeRequest, Regime, RegimeKind,
    SweepPoint, OBJECTIVE_TOL,
};
