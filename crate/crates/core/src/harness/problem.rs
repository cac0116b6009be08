//! Turning a [`RunConfig`] into an operator, initial data and exact solution.

use std::f64::consts::PI;
use std::sync::Arc;

use super::config::{ProblemKey, RunConfig};
use super::exact_riemann::{sod_states, ExactRiemann};
use crate::basis::{DgSpace, DgState};
use crate::equations::{
    manufactured_burgers, manufactured_euler, manufactured_linear_system, Advection, Burgers,
    ConservationLaw, Euler, EulerAverage, EquationKey, SpaceTimeFn, GAMMA,
};
use crate::error::{Error, Result};
use crate::limiter::Limiter;
use crate::linalg::Vector;
use crate::marching::{advance, MarchOptions, MarchStats};
use crate::mesh::CutCellMesh;
use crate::riemann::{FluxKey, GodunovBurgers, LinsysExact, NumericalFlux, Roe, Upwind};
use crate::spatial::SpatialOperator;

/// A fully assembled run for an `M`-component law.
pub struct Setup<const M: usize> {
    pub operator: SpatialOperator<M>,
    pub limiter: Option<Limiter<M>>,
    pub exact: Option<SpaceTimeFn<M>>,
    initial: SpaceTimeFn<M>,
    pub t_final: f64,
    pub options: MarchOptions,
}

impl<const M: usize> Setup<M> {
    pub fn space(&self) -> &DgSpace {
        self.operator.space()
    }

    pub fn initial_state(&self) -> DgState<M> {
        let f = &self.initial;
        self.space().project(|x| f(x, 0.0))
    }

    /// Advance the projected initial data to the final time.
    pub fn run(
        &self,
        on_step: impl FnMut(usize, f64, &DgState<M>),
    ) -> Result<(DgState<M>, MarchStats)> {
        let mut u = self.initial_state();
        let stats = advance(
            &mut u,
            &self.operator,
            self.limiter.as_ref(),
            0.0,
            &self.options,
            on_step,
        )?;
        Ok((u, stats))
    }
}

/// A setup for either a scalar law or a three-component system.
pub enum AnySetup {
    Scalar(Setup<1>),
    System(Setup<3>),
}

impl AnySetup {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let mesh = Arc::new(cfg.mesh.build()?);
        Self::on_mesh(cfg, mesh)
    }

    pub fn on_mesh(cfg: &RunConfig, mesh: Arc<CutCellMesh>) -> Result<Self> {
        match cfg.equation.components() {
            1 => Ok(Self::Scalar(scalar_setup(cfg, mesh)?)),
            _ => Ok(Self::System(system_setup(cfg, mesh)?)),
        }
    }

    pub fn space(&self) -> &DgSpace {
        match self {
            Self::Scalar(s) => s.space(),
            Self::System(s) => s.space(),
        }
    }
}

fn finish<const M: usize>(
    cfg: &RunConfig,
    mesh: Arc<CutCellMesh>,
    equation: Arc<dyn ConservationLaw<M>>,
    flux: Arc<dyn NumericalFlux<M>>,
    initial: SpaceTimeFn<M>,
    exact: Option<SpaceTimeFn<M>>,
    source: Option<SpaceTimeFn<M>>,
) -> Result<Setup<M>> {
    let space = DgSpace::new(mesh, cfg.p);
    let mut operator = SpatialOperator::new(
        space,
        equation,
        flux,
        cfg.boundary(),
        cfg.stabilization.to_stabilization(cfg.nu),
    )?;
    if let Some(g) = source {
        operator = operator.with_source(g);
    }
    let limiter = cfg
        .limiter
        .is_active()
        .then(|| Limiter::for_operator(cfg.limiter, &operator));
    let t_final = cfg.final_time();
    let options = MarchOptions {
        order: cfg.rk_order,
        ..MarchOptions::new(cfg.nu, t_final)
    };
    Ok(Setup {
        operator,
        limiter,
        exact,
        initial,
        t_final,
        options,
    })
}

fn flux_mismatch(cfg: &RunConfig) -> Error {
    Error::Config(format!(
        "flux {:?} is not available for {:?}",
        cfg.flux, cfg.equation
    ))
}

fn periodic(domain: (f64, f64), x: f64) -> f64 {
    domain.0 + (x - domain.0).rem_euclid(domain.1 - domain.0)
}

fn scalar_setup(cfg: &RunConfig, mesh: Arc<CutCellMesh>) -> Result<Setup<1>> {
    let domain = (mesh.x_left(), mesh.x_right());
    match cfg.equation {
        EquationKey::Advection => {
            let beta = 1.0;
            let flux: Arc<dyn NumericalFlux<1>> = match cfg.flux {
                FluxKey::Upwind | FluxKey::Godunov => Arc::new(Upwind { beta }),
                _ => return Err(flux_mismatch(cfg)),
            };
            let len = domain.1 - domain.0;
            let exact: SpaceTimeFn<1> = Arc::new(move |x, t| {
                Vector::<1>::new((2.0 * PI * (periodic(domain, x - beta * t) - domain.0) / len).sin())
            });
            finish(cfg, mesh, Arc::new(Advection { beta }), flux, exact.clone(), Some(exact), None)
        }
        EquationKey::Burgers => {
            if cfg.flux != FluxKey::Godunov {
                return Err(flux_mismatch(cfg));
            }
            let flux = Arc::new(GodunovBurgers);
            match cfg.problem {
                ProblemKey::Manufactured => {
                    let case = manufactured_burgers();
                    finish(cfg, mesh, Arc::new(Burgers), flux, case.exact.clone(), Some(case.exact), Some(case.source))
                }
                _ => {
                    let initial: SpaceTimeFn<1> =
                        Arc::new(|x, _| Vector::<1>::new((4.0 * PI * (x + 0.5)).sin()));
                    finish(cfg, mesh, Arc::new(Burgers), flux, initial, None, None)
                }
            }
        }
        _ => unreachable!("scalar setup for a system"),
    }
}

fn system_setup(cfg: &RunConfig, mesh: Arc<CutCellMesh>) -> Result<Setup<3>> {
    match cfg.equation {
        EquationKey::Linsys => {
            if cfg.flux != FluxKey::LinsysExact {
                return Err(flux_mismatch(cfg));
            }
            let case = manufactured_linear_system();
            let sys = crate::equations::LinearSystem::three_wave();
            let flux = Arc::new(LinsysExact::new(sys.decomposition()));
            finish(cfg, mesh, Arc::new(sys), flux, case.exact.clone(), Some(case.exact), None)
        }
        EquationKey::Euler => {
            if cfg.flux != FluxKey::Roe {
                return Err(flux_mismatch(cfg));
            }
            let euler = Euler {
                gamma: GAMMA,
                average: if cfg.stabilization.literal_roe_average {
                    EulerAverage::Literal
                } else {
                    EulerAverage::Roe
                },
            };
            let flux = Arc::new(Roe {
                euler: Euler::default(),
                entropy_fix: cfg.roe.entropy_fix,
                jacobian: cfg.roe.jacobian,
            });
            match cfg.problem {
                ProblemKey::Manufactured => {
                    let case = manufactured_euler();
                    finish(cfg, mesh, Arc::new(euler), flux, case.exact.clone(), Some(case.exact), Some(case.source))
                }
                _ => {
                    let (l, r) = sod_states();
                    let oracle = ExactRiemann::new(l, r, GAMMA)?;
                    let initial: SpaceTimeFn<3> = Arc::new(move |x, _| {
                        if x < 0.0 { l } else { r }.to_conserved(GAMMA)
                    });
                    let exact: SpaceTimeFn<3> = Arc::new(move |x, t| {
                        let w = if t > 0.0 {
                            oracle.sample(x / t)
                        } else if x < 0.0 {
                            l
                        } else {
                            r
                        };
                        w.to_conserved(GAMMA)
                    });
                    finish(cfg, mesh, Arc::new(euler), flux, initial, Some(exact), None)
                }
            }
        }
        _ => unreachable!("system setup for a scalar law"),
    }
}
