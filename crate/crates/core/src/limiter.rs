//! Generalized TVDM slope limiter with cut-cell neighbour bounds and an
//! optional positivity safeguard.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::{DgSpace, DgState};
use crate::dod::PairGeometry;
use crate::equations::ConservationLaw;
use crate::error::{Error, Result};
use crate::spatial::{BoundaryCondition, SpatialOperator};

const SLOPE_NORM: f64 = 1.224_744_871_391_589; // √(3/2)

/// Relative tolerance of the "is limiting necessary" checks.
pub const LIMITER_TOLERANCE: f64 = 1e-12;

/// `s·min|aᵢ|` if all arguments share the sign `s`, otherwise 0.
pub fn minmod(args: &[f64]) -> f64 {
    let Some(&first) = args.first() else {
        return 0.0;
    };
    if first == 0.0 {
        return 0.0;
    }
    let positive = first > 0.0;
    let mut m = first.abs();
    for &a in &args[1..] {
        if a == 0.0 || (a > 0.0) != positive {
            return 0.0;
        }
        m = m.min(a.abs());
    }
    if positive {
        m
    } else {
        -m
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimiterKind {
    #[default]
    Off,
    Tvdm,
}

impl std::str::FromStr for LimiterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(Self::Off),
            "tvdm" => Ok(Self::Tvdm),
            other => Err(Error::Config(format!("unknown limiter '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LimiterConfig {
    pub kind: LimiterKind,
    /// Flatten cells with inadmissible point values (meaningful for Euler).
    pub positivity: bool,
    /// Bound the extended neighbour values of stabilized cut cells.
    pub cut_neighbors: bool,
}

impl Default for LimiterConfig {
    fn default() -> Self {
        Self {
            kind: LimiterKind::Off,
            positivity: false,
            cut_neighbors: true,
        }
    }
}

impl LimiterConfig {
    pub fn tvdm() -> Self {
        Self {
            kind: LimiterKind::Tvdm,
            ..Self::default()
        }
    }

    pub fn is_active(&self) -> bool {
        self.kind == LimiterKind::Tvdm || self.positivity
    }
}

pub struct Limiter<const M: usize> {
    config: LimiterConfig,
    space: DgSpace,
    bc: BoundaryCondition,
    pairs: Vec<PairGeometry>,
    equation: Arc<dyn ConservationLaw<M>>,
}

impl<const M: usize> Limiter<M> {
    pub fn new(
        config: LimiterConfig,
        space: DgSpace,
        bc: BoundaryCondition,
        pairs: Vec<PairGeometry>,
        equation: Arc<dyn ConservationLaw<M>>,
    ) -> Self {
        Self {
            config,
            space,
            bc,
            pairs,
            equation,
        }
    }

    /// Limiter acting on the mesh, boundary and stabilized pairs of `op`.
    pub fn for_operator(config: LimiterConfig, op: &SpatialOperator<M>) -> Self {
        Self::new(
            config,
            op.space().clone(),
            op.boundary(),
            op.stabilized_pairs().to_vec(),
            op.equation_arc(),
        )
    }

    pub fn config(&self) -> &LimiterConfig {
        &self.config
    }

    /// Cell pass, cut-neighbour pass, then positivity guard, as configured.
    pub fn apply(&self, u: &mut DgState<M>) -> Result<()> {
        if self.config.kind == LimiterKind::Tvdm && u.modes() > 1 {
            for j in 0..u.n_cells() {
                self.limit_cell(u, j);
            }
            if self.config.cut_neighbors {
                for _ in 0..16 {
                    let mut changed = false;
                    for g in &self.pairs {
                        changed |= self.postprocess_cut_neighbors(u, g);
                    }
                    if !changed {
                        break;
                    }
                }
            }
        }
        if self.config.positivity {
            self.positivity_guard(u)?;
        }
        Ok(())
    }

    fn neighbors(&self, j: usize, n: usize) -> (Option<usize>, Option<usize>) {
        match self.bc {
            BoundaryCondition::Periodic => (Some((j + n - 1) % n), Some((j + 1) % n)),
            BoundaryCondition::Transmissive => (j.checked_sub(1), (j + 1 < n).then_some(j + 1)),
        }
    }

    /// Differences of the neighbouring averages, `(Δ⁻, Δ⁺)`, per component.
    fn differences(&self, u: &DgState<M>, j: usize, l: usize) -> (f64, f64) {
        let (jm, jp) = self.neighbors(j, u.n_cells());
        let avg = u.average(j)[l];
        (
            jm.map_or(0.0, |k| avg - u.average(k)[l]),
            jp.map_or(0.0, |k| u.average(k)[l] - avg),
        )
    }

    /// Limit cell `j`; returns whether any component changed.
    pub fn limit_cell(&self, u: &mut DgState<M>, j: usize) -> bool {
        let mut changed = false;
        if u.modes() < 2 {
            return false;
        }
        for l in 0..M {
            let avg = u.average(j)[l];
            let (dm, dp) = self.differences(u, j, l);
            let c = u.component(j, l);
            let left: f64 = c
                .iter()
                .enumerate()
                .map(|(i, v)| v * crate::basis::trace_value(i, false))
                .sum();
            let right: f64 = c
                .iter()
                .enumerate()
                .map(|(i, v)| v * crate::basis::trace_value(i, true))
                .sum();
            let a_left = minmod(&[avg - left, dm, dp]);
            let a_right = minmod(&[right - avg, dm, dp]);
            let scale = [avg, left, right, avg - dm, avg + dp]
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            let tol = LIMITER_TOLERANCE * scale;
            if ((avg - a_left) - left).abs() <= tol && ((avg + a_right) - right).abs() <= tol {
                continue;
            }
            let slope = c.get(1).copied().unwrap_or(0.0) * SLOPE_NORM;
            let d = minmod(&[slope, a_left, a_right]);
            let c = u.component_mut(j, l);
            c[1] = d / SLOPE_NORM;
            c[2..].fill(0.0);
            changed = true;
        }
        changed
    }

    /// Keep `u_{k−1}(x_cut)` and `u_{k₂}(x_{k−½})` within the range of the
    /// three cell averages of the pair.
    pub fn postprocess_cut_neighbors(&self, u: &mut DgState<M>, g: &PairGeometry) -> bool {
        let mut changed = false;
        if u.modes() < 2 {
            return false;
        }
        let targets = [(g.left, g.xi_left(1.0)), (g.large, g.xi_large(-1.0))];
        for l in 0..M {
            let avgs = [
                u.average(g.left)[l],
                u.average(g.small)[l],
                u.average(g.large)[l],
            ];
            let lo = avgs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = avgs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for &(j, xi) in &targets {
                let v = u.eval_ref(j, xi)[l];
                let tol = LIMITER_TOLERANCE * lo.abs().max(hi.abs()).max(v.abs());
                if v >= lo - tol && v <= hi + tol {
                    continue;
                }
                let avg = u.average(j)[l];
                let mut d = u.component(j, l).get(1).copied().unwrap_or(0.0) * SLOPE_NORM;
                let v1 = avg + d * xi;
                if v1 > hi {
                    d = (hi - avg) / xi;
                } else if v1 < lo {
                    d = (lo - avg) / xi;
                }
                let (dm, dp) = self.differences(u, j, l);
                let d = minmod(&[d, dm, dp]);
                let c = u.component_mut(j, l);
                c[1] = d / SLOPE_NORM;
                c[2..].fill(0.0);
                changed = true;
            }
        }
        changed
    }

    /// Replace cells with inadmissible trace or quadrature values by their
    /// averages; returns how many cells were flattened.
    pub fn positivity_guard(&self, u: &mut DgState<M>) -> Result<usize> {
        let table = self.space.table();
        let n_q = self.space.quadrature().len();
        let mut flattened = 0;
        for j in 0..u.n_cells() {
            let ok = [-1.0, 1.0]
                .iter()
                .map(|&xi| u.eval_ref(j, xi))
                .chain((0..n_q).map(|q| u.combine(j, table.values(q))))
                .all(|v| self.equation.check_admissible(&v).is_ok());
            if ok {
                continue;
            }
            self.equation
                .check_admissible(&u.average(j))
                .map_err(|e| e.at(j, f64::NAN))?;
            for l in 0..M {
                u.component_mut(j, l)[1..].fill(0.0);
            }
            flattened += 1;
        }
        Ok(flattened)
    }
}
