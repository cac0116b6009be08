//! Experiment drivers and reporting.

pub mod commands;
pub mod config;
pub mod convergence;
pub mod exact_riemann;
pub mod experiments;
pub mod norms;
pub mod output;
pub mod problem;

pub use config::{ConvergenceSpec, MeshLayout, MeshSpec, ProblemKey, RunConfig};
pub use convergence::{run_convergence, run_convergence_from, ConvergenceCase, ErrorReport, ErrorRow};
pub use exact_riemann::ExactRiemann;
pub use experiments::{run_burgers_shock, run_sod, solve, AnyState, RunOutcome};
pub use norms::error_norms;
pub use problem::{AnySetup, Setup};

use crate::mesh::CutCellMesh;

/// `(small cell, α)` of every cut pair with `ν ∉ (α, 1 − α)`, where the
/// monotonicity guarantee of the stabilized scheme does not apply.
pub fn cfl_violations(mesh: &CutCellMesh, nu: f64) -> Vec<(usize, f64)> {
    mesh.cut_pairs()
        .iter()
        .filter(|p| !(p.alpha < nu && nu < 1.0 - p.alpha))
        .map(|p| (p.small, p.alpha))
        .collect()
}
