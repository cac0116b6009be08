//! Convergence studies on manufactured and exact smooth solutions.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::norms::{error_norms, observed_order};
use super::problem::{AnySetup, Setup};
use crate::equations::EquationKey;
use crate::error::{Error, Result};
use crate::mesh::AlphaSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceCase {
    /// Burgers, manufactured `sin(4π(x − t))`, Godunov flux.
    Burgers,
    /// Three-wave linear system, exact Riemann flux.
    LinearSystem,
    /// Euler, manufactured smooth profile, Roe flux.
    Euler,
    /// Linear advection of `sin 2πx`, upwind flux.
    Advection,
}

impl ConvergenceCase {
    pub const ALL: [ConvergenceCase; 3] = [Self::Burgers, Self::LinearSystem, Self::Euler];

    pub fn equation(self) -> EquationKey {
        match self {
            Self::Burgers => EquationKey::Burgers,
            Self::LinearSystem => EquationKey::Linsys,
            Self::Euler => EquationKey::Euler,
            Self::Advection => EquationKey::Advection,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Burgers => "burgers",
            Self::LinearSystem => "linsys",
            Self::Euler => "euler",
            Self::Advection => "advection",
        }
    }

    pub fn from_equation(eq: EquationKey) -> Self {
        match eq {
            EquationKey::Burgers => Self::Burgers,
            EquationKey::Linsys => Self::LinearSystem,
            EquationKey::Euler => Self::Euler,
            EquationKey::Advection => Self::Advection,
        }
    }
}

/// Short label of a cut-fraction mode, e.g. `alpha=1e-1` or `random(42)`.
pub fn alpha_label(alpha: &AlphaSpec) -> String {
    match alpha {
        AlphaSpec::Constant { value } => format!("alpha={value:e}"),
        AlphaSpec::Random { seed } => format!("random({seed})"),
        AlphaSpec::PerCell { values } => format!("per-cell({})", values.len()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub n: usize,
    pub n_cells: usize,
    pub steps: usize,
    pub l1: f64,
    pub linf: f64,
    pub eoc_l1: Option<f64>,
    pub eoc_linf: Option<f64>,
    /// Set when the run failed; the norms are then NaN.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub case: ConvergenceCase,
    pub alpha: AlphaSpec,
    pub p: usize,
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    /// EOC between the last two successful refinements, `(L¹, L∞)`.
    pub fn terminal_eoc(&self) -> Option<(f64, f64)> {
        let last = self.rows.last()?;
        Some((last.eoc_l1?, last.eoc_linf?))
    }

    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }
}

impl fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} p={} {}",
            self.case.name(),
            self.p,
            alpha_label(&self.alpha)
        )?;
        writeln!(
            f,
            "{:>6} {:>7} {:>7} {:>12} {:>7} {:>12} {:>7}",
            "N", "cells", "steps", "L1", "EOC", "Linf", "EOC"
        )?;
        let eoc = |e: Option<f64>| e.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
        for r in &self.rows {
            if let Some(err) = &r.error {
                writeln!(f, "{:>6} {:>7} failed: {err}", r.n, r.n_cells)?;
                continue;
            }
            writeln!(
                f,
                "{:>6} {:>7} {:>7} {:>12.4e} {:>7} {:>12.4e} {:>7}",
                r.n,
                r.n_cells,
                r.steps,
                r.l1,
                eoc(r.eoc_l1),
                r.linf,
                eoc(r.eoc_linf)
            )?;
        }
        Ok(())
    }
}

/// Errors of one run at its final time.
pub fn run_errors(cfg: &RunConfig) -> Result<ErrorRow> {
    fn measure<const M: usize>(setup: &Setup<M>, n: usize) -> Result<ErrorRow> {
        let exact = setup
            .exact
            .clone()
            .ok_or_else(|| Error::Unsupported("problem has no exact solution".into()))?;
        let (u, stats) = setup.run(|_, _, _| {})?;
        let t = setup.t_final;
        let (l1, linf) = error_norms(setup.space(), &u, |x| exact(x, t));
        Ok(ErrorRow {
            n,
            n_cells: u.n_cells(),
            steps: stats.steps,
            l1,
            linf,
            eoc_l1: None,
            eoc_linf: None,
            error: None,
        })
    }
    match AnySetup::new(cfg)? {
        AnySetup::Scalar(s) => measure(&s, cfg.mesh.n),
        AnySetup::System(s) => measure(&s, cfg.mesh.n),
    }
}

/// Fill in the observed orders between consecutive successful rows.
pub fn fill_eoc(rows: &mut [ErrorRow]) {
    for i in 1..rows.len() {
        let (prev, cur) = (&rows[i - 1], &rows[i]);
        if prev.error.is_some() || cur.error.is_some() {
            continue;
        }
        let l1 = observed_order(prev.l1, cur.l1, prev.n, cur.n);
        let linf = observed_order(prev.linf, cur.linf, prev.n, cur.n);
        rows[i].eoc_l1 = Some(l1);
        rows[i].eoc_linf = Some(linf);
    }
}

/// Sweep `p_list × n_list` for one case and cut-fraction mode on the banded
/// mesh of (0, 1). Runs execute in parallel; failures are recorded per row.
pub fn run_convergence(
    case: ConvergenceCase,
    alpha: &AlphaSpec,
    p_list: &[usize],
    n_list: &[usize],
) -> Vec<ErrorReport> {
    let base = RunConfig::smooth(case.equation(), 0, n_list.first().copied().unwrap_or(20), alpha.clone());
    run_convergence_from(&base, p_list, n_list)
}

/// As [`run_convergence`], varying `p` and `mesh.n` of a base configuration.
pub fn run_convergence_from(base: &RunConfig, p_list: &[usize], n_list: &[usize]) -> Vec<ErrorReport> {
    let jobs: Vec<(usize, usize)> = p_list
        .iter()
        .flat_map(|&p| n_list.iter().map(move |&n| (p, n)))
        .collect();
    let rows: Vec<ErrorRow> = jobs
        .par_iter()
        .map(|&(p, n)| {
            let mut cfg = base.clone();
            cfg.p = p;
            cfg.mesh = cfg.mesh.with_n(n);
            run_errors(&cfg).unwrap_or_else(|e| ErrorRow {
                n,
                n_cells: cfg.mesh.build().map(|m| m.n_cells()).unwrap_or(0),
                steps: 0,
                l1: f64::NAN,
                linf: f64::NAN,
                eoc_l1: None,
                eoc_linf: None,
                error: Some(e.to_string()),
            })
        })
        .collect();
    let mut rows = rows.into_iter();
    p_list
        .iter()
        .map(|&p| {
            let mut r: Vec<ErrorRow> = rows.by_ref().take(n_list.len()).collect();
            fill_eoc(&mut r);
            ErrorReport {
                case: ConvergenceCase::from_equation(base.equation),
                alpha: base.mesh.alpha.clone(),
                p,
                rows: r,
            }
        })
        .collect()
}
