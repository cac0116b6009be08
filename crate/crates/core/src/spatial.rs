//! Semi-discrete operator `d_t U = M⁻¹(−a_h(u, ·) − J_h(u, ·) + S_h(g, ·))`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::{trace_value, DgSpace, DgState};
use crate::dod::{
    check_legacy_support, j0_edge_penalty, j1_volume_penalty, stabilization_record,
    stabilized_pairs, PairGeometry, PenaltyContext, StabilizationRecord, VolumeVariant,
};
use crate::equations::{ConservationLaw, SpaceTimeFn};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::riemann::NumericalFlux;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Periodic,
    /// Ghost trace equals the interior trace.
    Transmissive,
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Self::Periodic),
            "transmissive" => Ok(Self::Transmissive),
            other => Err(Error::Config(format!("unknown boundary condition '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Stabilization {
    pub enabled: bool,
    pub variant: VolumeVariant,
    /// CFL number; decides `η` and which pairs are stabilized.
    pub nu: f64,
    pub kink_aware: bool,
}

impl Default for Stabilization {
    fn default() -> Self {
        Self {
            enabled: true,
            variant: VolumeVariant::Full,
            nu: 0.4,
            kink_aware: true,
        }
    }
}

impl Stabilization {
    pub fn off() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }

    pub fn with_nu(nu: f64) -> Self {
        Self {
            nu,
            ..Self::default()
        }
    }
}

pub struct SpatialOperator<const M: usize> {
    space: DgSpace,
    equation: Arc<dyn ConservationLaw<M>>,
    flux: Arc<dyn NumericalFlux<M>>,
    bc: BoundaryCondition,
    source: Option<SpaceTimeFn<M>>,
    stabilization: Stabilization,
    pairs: Vec<PairGeometry>,
}

impl<const M: usize> SpatialOperator<M> {
    pub fn new(
        space: DgSpace,
        equation: Arc<dyn ConservationLaw<M>>,
        flux: Arc<dyn NumericalFlux<M>>,
        bc: BoundaryCondition,
        stabilization: Stabilization,
    ) -> Result<Self> {
        if !(stabilization.nu > 0.0 && stabilization.nu < 1.0) {
            return Err(Error::Domain(format!(
                "CFL number {} outside (0, 1)",
                stabilization.nu
            )));
        }
        let pairs = if stabilization.enabled {
            stabilized_pairs(space.mesh(), stabilization.nu)
        } else {
            Vec::new()
        };
        if stabilization.enabled && stabilization.variant == VolumeVariant::Legacy {
            check_legacy_support(equation.name(), flux.name())?;
        }
        if bc == BoundaryCondition::Transmissive {
            if let Some(p) = pairs.iter().find(|p| p.small == 0) {
                return Err(Error::Mesh(format!(
                    "small cut cell {} has no left neighbour without periodic wrap",
                    p.small
                )));
            }
        }
        Ok(Self {
            space,
            equation,
            flux,
            bc,
            source: None,
            stabilization,
            pairs,
        })
    }

    pub fn with_source(mut self, source: SpaceTimeFn<M>) -> Self {
        self.source = Some(source);
        self
    }

    pub fn space(&self) -> &DgSpace {
        &self.space
    }

    pub fn equation(&self) -> &dyn ConservationLaw<M> {
        self.equation.as_ref()
    }

    pub fn equation_arc(&self) -> Arc<dyn ConservationLaw<M>> {
        Arc::clone(&self.equation)
    }

    pub fn flux(&self) -> &dyn NumericalFlux<M> {
        self.flux.as_ref()
    }

    pub fn boundary(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn stabilization(&self) -> &Stabilization {
        &self.stabilization
    }

    /// Geometry of the cut pairs that receive stabilization.
    pub fn stabilized_pairs(&self) -> &[PairGeometry] {
        &self.pairs
    }

    pub fn dim(&self) -> usize {
        self.space.mesh().n_cells() * M * self.space.modes()
    }

    /// Ghost traces outside the left and right boundary.
    pub fn ghost_traces(&self, u: &DgState<M>) -> (Vector<M>, Vector<M>) {
        let n = u.n_cells();
        match self.bc {
            BoundaryCondition::Periodic => (
                self.space.trace(u, n - 1, true),
                self.space.trace(u, 0, false),
            ),
            BoundaryCondition::Transmissive => (
                self.space.trace(u, 0, false),
                self.space.trace(u, n - 1, true),
            ),
        }
    }

    pub fn records(&self, u: &DgState<M>) -> Result<Vec<StabilizationRecord<M>>> {
        self.pairs
            .iter()
            .map(|g| stabilization_record(u, g, self.equation.as_ref()))
            .collect()
    }

    fn residual_inner(
        &self,
        u: &DgState<M>,
        t: f64,
        with_source: bool,
        out: &mut [f64],
    ) -> Result<()> {
        assert_eq!(out.len(), u.len());
        out.fill(0.0);
        let mesh = self.space.mesh();
        let n = mesh.n_cells();
        let modes = self.space.modes();
        let right: Vec<f64> = (0..modes).map(|i| trace_value(i, true)).collect();
        let left: Vec<f64> = (0..modes).map(|i| trace_value(i, false)).collect();
        let (ghost_l, ghost_r) = self.ghost_traces(u);

        for e in 0..=n {
            let a = if e == 0 {
                ghost_l
            } else {
                self.space.trace(u, e - 1, true)
            };
            let b = if e == n {
                ghost_r
            } else {
                self.space.trace(u, e, false)
            };
            let h = self
                .flux
                .flux(&a, &b)
                .map_err(|err| err.at(e.min(n - 1), t))?;
            for l in 0..M {
                if e > 0 {
                    for i in 0..modes {
                        out[u.index(e - 1, l, i)] += h[l] * right[i];
                    }
                }
                if e < n {
                    for i in 0..modes {
                        out[u.index(e, l, i)] -= h[l] * left[i];
                    }
                }
            }
        }

        let quad = self.space.quadrature();
        let table = self.space.table();
        if modes > 1 || self.equation.name() == "euler" {
            for j in 0..n {
                for (q, &w) in quad.weights.iter().enumerate() {
                    let uq = u.combine(j, table.values(q));
                    self.equation
                        .check_admissible(&uq)
                        .map_err(|err| err.at(j, t))?;
                    let f = self.equation.flux(&uq);
                    let d = table.derivs(q);
                    for l in 0..M {
                        for i in 1..modes {
                            out[u.index(j, l, i)] -= w * f[l] * d[i];
                        }
                    }
                }
            }
        }

        if !self.pairs.is_empty() {
            let ctx = PenaltyContext {
                equation: self.equation.as_ref(),
                flux: self.flux.as_ref(),
                quadrature: quad,
                kink_aware: self.stabilization.kink_aware,
            };
            for g in &self.pairs {
                let rec = stabilization_record(u, g, self.equation.as_ref())
                    .map_err(|err| err.at(g.small, t))?;
                j0_edge_penalty(u, g, self.flux.as_ref(), out).map_err(|err| err.at(g.small, t))?;
                j1_volume_penalty(u, g, &rec, &ctx, self.stabilization.variant, out)
                    .map_err(|err| err.at(g.small, t))?;
            }
        }

        if with_source {
            if let Some(src) = &self.source {
                for (j, cell) in mesh.cells().iter().enumerate() {
                    let half = 0.5 * cell.length;
                    for (q, (&xi, &w)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
                        let g = src(cell.map(xi), t);
                        let phi = table.values(q);
                        for l in 0..M {
                            for i in 0..modes {
                                out[u.index(j, l, i)] -= half * w * g[l] * phi[i];
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `a_h(u, φ) + J_h(u, φ) − S_h(g, φ)` for every basis function `φ`.
    pub fn residual(&self, u: &DgState<M>, t: f64, out: &mut [f64]) -> Result<()> {
        self.residual_inner(u, t, true, out)
    }

    /// Time derivative of the coefficients.
    pub fn rhs(&self, u: &DgState<M>, t: f64, out: &mut [f64]) -> Result<()> {
        self.residual(u, t, out)?;
        let stride = M * self.space.modes();
        for (j, cell) in self.space.mesh().cells().iter().enumerate() {
            let s = -2.0 / cell.length;
            for v in &mut out[j * stride..(j + 1) * stride] {
                *v *= s;
            }
        }
        Ok(())
    }

    pub fn rhs_state(&self, u: &DgState<M>, t: f64) -> Result<DgState<M>> {
        let mut out = vec![0.0; u.len()];
        self.rhs(u, t, &mut out)?;
        Ok(DgState::from_coeffs(u.n_cells(), u.degree(), out))
    }

    /// `a_h(u, u) + J_h(u, u)`, i.e. minus the semi-discrete rate of `½‖u‖²`.
    pub fn energy_form(&self, u: &DgState<M>) -> Result<f64> {
        let mut out = vec![0.0; u.len()];
        self.residual_inner(u, 0.0, false, &mut out)?;
        Ok(out.iter().zip(u.as_slice()).map(|(r, c)| r * c).sum())
    }

    /// Largest wave speed over all traces and quadrature points.
    pub fn max_wave_speed(&self, u: &DgState<M>) -> f64 {
        let table = self.space.table();
        let mut lam = 0.0f64;
        for j in 0..u.n_cells() {
            lam = lam
                .max(self.equation.max_wave_speed(&self.space.trace(u, j, false)))
                .max(self.equation.max_wave_speed(&self.space.trace(u, j, true)));
            for q in 0..self.space.quadrature().len() {
                lam = lam.max(self.equation.max_wave_speed(&u.combine(j, table.values(q))));
            }
        }
        lam
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{Advection, Burgers, Euler, LinearSystem, Primitive, GAMMA};
    use crate::mesh::{banded_mesh, model_mesh, AlphaSpec, CutCellMesh};
    use crate::riemann::{GodunovBurgers, LinsysExact, Roe, Upwind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn advection_op(mesh: CutCellMesh, p: usize, stab: Stabilization) -> SpatialOperator<1> {
        SpatialOperator::new(
            DgSpace::new(Arc::new(mesh), p),
            Arc::new(Advection { beta: 1.0 }),
            Arc::new(Upwind { beta: 1.0 }),
            BoundaryCondition::Periodic,
            stab,
        )
        .unwrap()
    }

    fn random<const M: usize>(op: &SpatialOperator<M>, seed: u64) -> DgState<M> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = op.space().zeros::<M>();
        for c in u.as_mut_slice() {
            *c = rng.gen_range(-1.0..1.0);
        }
        u
    }

    #[test]
    fn constant_state_is_steady() {
        let mesh = banded_mesh(20, (0.0, 1.0), (0.1, 0.9), &AlphaSpec::random(3)).unwrap();
        for bc in [BoundaryCondition::Periodic, BoundaryCondition::Transmissive] {
            let op = SpatialOperator::<1>::new(
                DgSpace::new(Arc::new(mesh.clone()), 3),
                Arc::new(Burgers),
                Arc::new(GodunovBurgers),
                bc,
                Stabilization::default(),
            )
            .unwrap();
            let u = op.space().project(|_| Vector::<1>::new(0.8));
            let mut out = vec![0.0; u.len()];
            op.residual(&u, 0.0, &mut out).unwrap();
            let m = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(m < 1e-13, "{m}");
        }
    }

    #[test]
    fn euler_constant_state_is_steady() {
        let mesh = banded_mesh(10, (0.0, 1.0), (0.1, 0.9), &AlphaSpec::constant(1e-3)).unwrap();
        let op = SpatialOperator::<3>::new(
            DgSpace::new(Arc::new(mesh), 2),
            Arc::new(Euler::default()),
            Arc::new(Roe::default()),
            BoundaryCondition::Transmissive,
            Stabilization::default(),
        )
        .unwrap();
        let c = Primitive::new(1.2, 0.4, 0.9).to_conserved(GAMMA);
        let u = op.space().project(|_| c);
        let mut out = vec![0.0; u.len()];
        op.residual(&u, 0.0, &mut out).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn p0_uniform_upwind_difference() {
        let op = advection_op(CutCellMesh::uniform(8, (0.0, 1.0)).unwrap(), 0, Stabilization::default());
        let u = random(&op, 1);
        let r = op.rhs_state(&u, 0.0).unwrap();
        for j in 0..8 {
            let jm = (j + 7) % 8;
            let expected = -(u.average(j)[0] - u.average(jm)[0]) / 0.125;
            assert!((r.average(j)[0] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_textbook_dg_on_uniform_mesh() {
        // a_h(u, φ_i) on cell j for advection: H φ_i(1) − H φ_i(−1) − β∫u φ_i'
        let op = advection_op(CutCellMesh::uniform(5, (0.0, 1.0)).unwrap(), 2, Stabilization::off());
        let u = random(&op, 2);
        let mut out = vec![0.0; u.len()];
        op.residual(&u, 0.0, &mut out).unwrap();
        let q = crate::basis::Quadrature::gauss_legendre(5);
        for j in 0..5 {
            let up_right = u.eval_ref(j, 1.0)[0];
            let up_left = u.eval_ref((j + 4) % 5, 1.0)[0];
            for i in 0..3 {
                let mut vol = 0.0;
                for (&xi, &w) in q.nodes.iter().zip(&q.weights) {
                    let mut d = [0.0; 3];
                    crate::basis::basis_derivatives(xi, &mut d);
                    vol += w * u.eval_ref(j, xi)[0] * d[i];
                }
                let expected = up_right * trace_value(i, true) - up_left * trace_value(i, false) - vol;
                assert!((out[u.index(j, 0, i)] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn periodic_and_transmissive_ghosts() {
        let op = advection_op(CutCellMesh::uniform(3, (0.0, 1.0)).unwrap(), 0, Stabilization::default());
        let mut u = op.space().zeros::<1>();
        u.set_average(2, 0, 7.0);
        u.set_average(0, 0, 3.0);
        assert!((op.ghost_traces(&u).0[0] - 7.0).abs() < 1e-14);
        let op_t = SpatialOperator::<1>::new(
            op.space().clone(),
            Arc::new(Advection { beta: 1.0 }),
            Arc::new(Upwind { beta: 1.0 }),
            BoundaryCondition::Transmissive,
            Stabilization::default(),
        )
        .unwrap();
        assert!((op_t.ghost_traces(&u).0[0] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn linear_operators_are_linear() {
        let mesh = banded_mesh(10, (0.0, 1.0), (0.1, 0.9), &AlphaSpec::constant(1e-2)).unwrap();
        let sys = LinearSystem::three_wave();
        let op = SpatialOperator::<3>::new(
            DgSpace::new(Arc::new(mesh), 2),
            Arc::new(sys.clone()),
            Arc::new(LinsysExact::new(sys.decomposition())),
            BoundaryCondition::Periodic,
            Stabilization::default(),
        )
        .unwrap();
        let u = random(&op, 4);
        let v = random(&op, 5);
        let mut w = u.clone();
        for (x, (a, b)) in w.as_mut_slice().iter_mut().zip(u.as_slice().iter().zip(v.as_slice())) {
            *x = 2.0 * a - 0.5 * b;
        }
        let ru = op.rhs_state(&u, 0.0).unwrap();
        let rv = op.rhs_state(&v, 0.0).unwrap();
        let rw = op.rhs_state(&w, 0.0).unwrap();
        let scale = ru.as_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for k in 0..u.len() {
            let lin = 2.0 * ru.as_slice()[k] - 0.5 * rv.as_slice()[k];
            assert!((rw.as_slice()[k] - lin).abs() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn mass_is_conserved_by_residual() {
        let mesh = model_mesh(10, 5, 1e-3, (0.0, 1.0)).unwrap();
        let op = SpatialOperator::<1>::new(
            DgSpace::new(Arc::new(mesh), 3),
            Arc::new(Burgers),
            Arc::new(GodunovBurgers),
            BoundaryCondition::Periodic,
            Stabilization::default(),
        )
        .unwrap();
        for seed in 0..20 {
            let u = random(&op, seed);
            let mut out = vec![0.0; u.len()];
            op.residual(&u, 0.0, &mut out).unwrap();
            let total: f64 = (0..u.n_cells()).map(|j| out[u.index(j, 0, 0)]).sum();
            assert!(total.abs() < 1e-12, "{total}");
        }
    }

    #[test]
    fn wrapping_pair_needs_periodic_boundaries() {
        let mesh = model_mesh(10, 1, 0.1, (0.0, 1.0)).unwrap();
        let r = SpatialOperator::<1>::new(
            DgSpace::new(Arc::new(mesh), 1),
            Arc::new(Advection { beta: 1.0 }),
            Arc::new(Upwind { beta: 1.0 }),
            BoundaryCondition::Transmissive,
            Stabilization::default(),
        );
        assert!(matches!(r, Err(Error::Mesh(_))));
    }

    #[test]
    fn inadmissible_state_reports_cell() {
        let mesh = CutCellMesh::uniform(4, (0.0, 1.0)).unwrap();
        let op = SpatialOperator::<3>::new(
            DgSpace::new(Arc::new(mesh), 1),
            Arc::new(Euler::default()),
            Arc::new(Roe::default()),
            BoundaryCondition::Transmissive,
            Stabilization::default(),
        )
        .unwrap();
        let good = Primitive::new(1.0, 0.0, 1.0).to_conserved(GAMMA);
        let mut u = op.space().project(|_| good);
        u.component_mut(2, 2)[0] = -0.01;
        let mut out = vec![0.0; u.len()];
        let err = op.residual(&u, 0.5, &mut out).unwrap_err();
        assert!(matches!(err, Error::Admissibility { cell: Some(_), time: Some(t), .. } if t == 0.5));
    }
}
