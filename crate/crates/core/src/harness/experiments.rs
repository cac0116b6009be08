//! Single runs: generic solve, the shock tube and the Burgers shock.

use std::io::Write;

use serde::Serialize;

use super::config::{ProblemKey, RunConfig};
use super::norms::error_norms;
use super::problem::{AnySetup, Setup};
use crate::basis::{basis_values, DgSpace, DgState, Quadrature};
use crate::equations::{EquationKey, Primitive, GAMMA};
use crate::error::{Error, Result};
use crate::marching::MarchStats;

/// Final state of a run for either component count.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyState {
    Scalar(DgState<1>),
    System(DgState<3>),
}

impl AnyState {
    pub fn n_cells(&self) -> usize {
        match self {
            Self::Scalar(u) => u.n_cells(),
            Self::System(u) => u.n_cells(),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        match self {
            Self::Scalar(u) => u.as_slice(),
            Self::System(u) => u.as_slice(),
        }
    }

    /// Cell averages of component `l`.
    pub fn averages(&self, l: usize) -> Vec<f64> {
        match self {
            Self::Scalar(u) => (0..u.n_cells()).map(|j| u.average(j)[l]).collect(),
            Self::System(u) => (0..u.n_cells()).map(|j| u.average(j)[l]).collect(),
        }
    }

    pub fn write_snapshot<W: Write>(&self, space: &DgSpace, equation: EquationKey, w: W) -> std::io::Result<()> {
        match self {
            Self::Scalar(u) => write_snapshot(space, u, equation, w),
            Self::System(u) => write_snapshot(space, u, equation, w),
        }
    }
}

/// Column names of the plotted variables.
pub fn variable_names(equation: EquationKey) -> &'static [&'static str] {
    match equation {
        EquationKey::Advection | EquationKey::Burgers => &["u"],
        EquationKey::Linsys => &["u1", "u2", "u3"],
        EquationKey::Euler => &["rho", "v", "p"],
    }
}

/// Left trace, centroid value and right trace of every cell; Euler states are
/// written as primitive variables.
pub fn write_snapshot<const M: usize, W: Write>(
    space: &DgSpace,
    u: &DgState<M>,
    equation: EquationKey,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "cell,kind,x,{}", variable_names(equation).join(","))?;
    for (j, cell) in space.mesh().cells().iter().enumerate() {
        for xi in [-1.0, 0.0, 1.0] {
            let v = u.eval_ref(j, xi);
            let values: Vec<f64> = if equation == EquationKey::Euler && M == 3 {
                let p = Primitive::from_conserved(&crate::linalg::Vector::<3>::from_fn(|i, _| v[i]), GAMMA);
                vec![p.rho, p.v, p.p]
            } else {
                v.iter().copied().collect()
            };
            let cols: Vec<String> = values.iter().map(|x| format!("{x:.17e}")).collect();
            writeln!(w, "{j},{},{:.17e},{}", cell.kind.as_str(), cell.map(xi), cols.join(","))?;
        }
    }
    Ok(())
}

pub struct RunOutcome {
    pub space: DgSpace,
    pub state: AnyState,
    pub stats: MarchStats,
    /// `(L¹, L∞)` against the exact solution when the problem has one.
    pub errors: Option<(f64, f64)>,
}

/// Run a configuration to its final time.
///
/// With `output.snapshot_every = Some(k)`, `snapshot(step, t, csv)` receives the
/// snapshot CSV every `k` steps.
pub fn solve(cfg: &RunConfig, mut snapshot: impl FnMut(usize, f64, &[u8])) -> Result<RunOutcome> {
    fn go<const M: usize>(
        cfg: &RunConfig,
        setup: &Setup<M>,
        snapshot: &mut dyn FnMut(usize, f64, &[u8]),
    ) -> Result<(DgState<M>, MarchStats, Option<(f64, f64)>)> {
        let every = cfg.output.snapshot_every.filter(|&k| k > 0);
        let (u, stats) = setup.run(|step, t, u| {
            if every.is_some_and(|k| step % k == 0) {
                let mut buf = Vec::new();
                if write_snapshot(setup.space(), u, cfg.equation, &mut buf).is_ok() {
                    snapshot(step, t, &buf);
                }
            }
        })?;
        let errors = setup.exact.as_ref().map(|exact| {
            let t = setup.t_final;
            error_norms(setup.space(), &u, |x| exact(x, t))
        });
        Ok((u, stats, errors))
    }
    match AnySetup::new(cfg)? {
        AnySetup::Scalar(s) => {
            let (u, stats, errors) = go(cfg, &s, &mut snapshot)?;
            Ok(RunOutcome {
                space: s.space().clone(),
                state: AnyState::Scalar(u),
                stats,
                errors,
            })
        }
        AnySetup::System(s) => {
            let (u, stats, errors) = go(cfg, &s, &mut snapshot)?;
            Ok(RunOutcome {
                space: s.space().clone(),
                state: AnyState::System(u),
                stats,
                errors,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SodDiagnostics {
    pub steps: usize,
    /// Minimum over quadrature points and traces.
    pub min_density: f64,
    pub min_pressure: f64,
    /// Total variation of the density cell averages.
    pub total_variation: f64,
    /// `∫|ρ_h − ρ|` against the exact Riemann solution.
    pub l1_density: f64,
}

pub struct SodReport {
    pub outcome: RunOutcome,
    pub diagnostics: SodDiagnostics,
}

/// Shock tube: Euler, transmissive boundaries, compared with the exact solution.
pub fn run_sod(cfg: &RunConfig, snapshot: impl FnMut(usize, f64, &[u8])) -> Result<SodReport> {
    if cfg.equation != EquationKey::Euler || cfg.problem != ProblemKey::Sod {
        return Err(Error::Config("the shock tube needs equation = euler, problem = sod".into()));
    }
    let outcome = solve(cfg, snapshot)?;
    let AnyState::System(u) = &outcome.state else {
        unreachable!("Euler has three components")
    };
    let space = &outcome.space;
    let (l, r) = super::exact_riemann::sod_states();
    let oracle = super::exact_riemann::ExactRiemann::new(l, r, GAMMA)?;
    let t = cfg.final_time();
    let quad = Quadrature::gauss_legendre(12);
    let mut phi = vec![0.0; u.modes()];
    let (mut min_density, mut min_pressure, mut l1_density) = (f64::INFINITY, f64::INFINITY, 0.0);
    for (j, cell) in space.mesh().cells().iter().enumerate() {
        let mut sample = |xi: f64| {
            basis_values(xi, &mut phi);
            Primitive::from_conserved(&u.combine(j, &phi), GAMMA)
        };
        for xi in [-1.0, 1.0] {
            let w = sample(xi);
            min_density = min_density.min(w.rho);
            min_pressure = min_pressure.min(w.p);
        }
        let mut cell_l1 = 0.0;
        for (&xi, &wq) in quad.nodes.iter().zip(&quad.weights) {
            let w = sample(xi);
            min_density = min_density.min(w.rho);
            min_pressure = min_pressure.min(w.p);
            cell_l1 += wq * (w.rho - oracle.sample(cell.map(xi) / t).rho).abs();
        }
        l1_density += 0.5 * cell.length * cell_l1;
    }
    let rho = outcome.state.averages(0);
    let total_variation = rho.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let diagnostics = SodDiagnostics {
        steps: outcome.stats.steps,
        min_density,
        min_pressure,
        total_variation,
        l1_density,
    };
    Ok(SodReport {
        outcome,
        diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShockDiagnostics {
    pub steps: usize,
    pub min_average: f64,
    pub max_average: f64,
    /// Distance of the cell averages outside the initial range [−1, 1].
    pub overshoot: f64,
    /// Same measure on traces and centroids.
    pub point_overshoot: f64,
}

pub struct ShockReport {
    pub outcome: RunOutcome,
    pub diagnostics: ShockDiagnostics,
}

/// Burgers with `sin(4π(x + 0.5))`: bounds of the solution at the final time.
pub fn run_burgers_shock(cfg: &RunConfig, snapshot: impl FnMut(usize, f64, &[u8])) -> Result<ShockReport> {
    if cfg.equation != EquationKey::Burgers || cfg.problem != ProblemKey::SineShock {
        return Err(Error::Config("the Burgers shock needs equation = burgers, problem = sine-shock".into()));
    }
    let outcome = solve(cfg, snapshot)?;
    let AnyState::Scalar(u) = &outcome.state else {
        unreachable!("Burgers is scalar")
    };
    let avg = outcome.state.averages(0);
    let min_average = avg.iter().copied().fold(f64::INFINITY, f64::min);
    let max_average = avg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let excess = |lo: f64, hi: f64| (hi - 1.0).max(-1.0 - lo).max(0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..u.n_cells() {
        for xi in [-1.0, 0.0, 1.0] {
            let v = u.eval_ref(j, xi)[0];
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let diagnostics = ShockDiagnostics {
        steps: outcome.stats.steps,
        min_average,
        max_average,
        overshoot: excess(min_average, max_average),
        point_overshoot: excess(lo, hi),
    };
    Ok(ShockReport {
        outcome,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::AlphaSpec;

    #[test]
    fn snapshot_has_three_rows_per_cell() {
        let cfg = RunConfig::smooth(EquationKey::Euler, 1, 10, AlphaSpec::constant(0.1));
        let AnySetup::System(setup) = AnySetup::new(&cfg).unwrap() else {
            panic!()
        };
        let mut buf = Vec::new();
        write_snapshot(setup.space(), &setup.initial_state(), EquationKey::Euler, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "cell,kind,x,rho,v,p");
        assert_eq!(lines.len(), 1 + 3 * 18);
        let first: Vec<f64> = lines[1].split(',').skip(2).map(|s| s.parse().unwrap()).collect();
        // ρ = 2 + sin 0, v = 0, p = 2 + cos 0 at x = 0
        assert!(first[0].abs() < 1e-15);
        assert!((first[1] - 2.0).abs() < 0.05 && first[2].abs() < 0.05 && (first[3] - 3.0).abs() < 0.05);
    }

    #[test]
    fn snapshots_are_emitted_on_schedule() {
        let mut cfg = RunConfig::smooth(EquationKey::Advection, 0, 10, AlphaSpec::constant(0.1));
        cfg.t_final = Some(0.1);
        cfg.output.snapshot_every = Some(2);
        let mut steps = Vec::new();
        let out = solve(&cfg, |s, _, csv| {
            assert!(csv.starts_with(b"cell,kind,x,u"));
            steps.push(s);
        })
        .unwrap();
        assert!(!steps.is_empty() && steps.iter().all(|s| s % 2 == 0));
        assert_eq!(steps.len(), out.stats.steps / 2);
    }

    #[test]
    fn wrong_problem_is_rejected() {
        let cfg = RunConfig::burgers_shock(0, false);
        assert!(matches!(run_sod(&cfg, |_, _, _| {}), Err(Error::Config(_))));
    }
}
