//! Conservation laws `u_t + f(u)_x = g` handled by the solver.
//!
//! Each law provides its flux, Jacobian, real eigenstructure and wave speed.
//! Source terms and exact solutions belong to a [`ManufacturedCase`] or to the
//! harness problem that sets up a run, not to the law itself.

mod euler;
mod manufactured;

use std::sync::Arc;

pub use euler::{
    euler_eigen_from_roe_state, euler_flux, euler_jacobian_from_vh, Euler, EulerAverage,
    Primitive, GAMMA,
};
pub use manufactured::{
    linear_system_exact, manufactured_burgers, manufactured_euler, manufactured_linear_system,
    ManufacturedCase,
};

use crate::error::{Error, Result};
use crate::linalg::{real_eigen_decomposition, EigenDecomposition, Matrix, Vector};

/// Function of `(x, t)`, used for sources and exact solutions.
pub type SpaceTimeFn<const M: usize> = Arc<dyn Fn(f64, f64) -> Vector<M> + Send + Sync>;

/// Absolute floor for density and pressure.
pub const ADMISSIBILITY_FLOOR: f64 = 1e-12;

pub trait ConservationLaw<const M: usize>: Send + Sync {
    fn name(&self) -> &'static str;

    fn flux(&self, u: &Vector<M>) -> Vector<M>;

    fn jacobian(&self, u: &Vector<M>) -> Matrix<M>;

    fn eigen(&self, u: &Vector<M>) -> Result<EigenDecomposition<M>>;

    fn max_wave_speed(&self, u: &Vector<M>) -> f64;

    fn check_admissible(&self, _u: &Vector<M>) -> Result<()> {
        Ok(())
    }

    /// State at which the flow direction between two neighbours is decided.
    fn averaged_state(&self, a: &Vector<M>, b: &Vector<M>) -> Result<Vector<M>> {
        Ok((a + b) * 0.5)
    }

    /// True when the flux is linear in `u` with a state-independent Jacobian.
    fn is_linear(&self) -> bool {
        false
    }
}

/// Linear advection `u_t + β u_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Advection {
    pub beta: f64,
}

impl ConservationLaw<1> for Advection {
    fn name(&self) -> &'static str {
        "advection"
    }

    fn flux(&self, u: &Vector<1>) -> Vector<1> {
        u * self.beta
    }

    fn jacobian(&self, _u: &Vector<1>) -> Matrix<1> {
        Matrix::<1>::new(self.beta)
    }

    fn eigen(&self, _u: &Vector<1>) -> Result<EigenDecomposition<1>> {
        Ok(scalar_eigen(self.beta))
    }

    fn max_wave_speed(&self, _u: &Vector<1>) -> f64 {
        self.beta.abs()
    }

    fn is_linear(&self) -> bool {
        true
    }
}

/// Inviscid Burgers equation, `f(u) = u²/2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Burgers;

impl ConservationLaw<1> for Burgers {
    fn name(&self) -> &'static str {
        "burgers"
    }

    fn flux(&self, u: &Vector<1>) -> Vector<1> {
        Vector::<1>::new(0.5 * u[0] * u[0])
    }

    fn jacobian(&self, u: &Vector<1>) -> Matrix<1> {
        Matrix::<1>::new(u[0])
    }

    fn eigen(&self, u: &Vector<1>) -> Result<EigenDecomposition<1>> {
        Ok(scalar_eigen(u[0]))
    }

    fn max_wave_speed(&self, u: &Vector<1>) -> f64 {
        u[0].abs()
    }
}

fn scalar_eigen(lambda: f64) -> EigenDecomposition<1> {
    EigenDecomposition {
        q: Matrix::<1>::identity(),
        lambda: Vector::<1>::new(lambda),
        q_inv: Matrix::<1>::identity(),
    }
}

/// Constant-coefficient system `u_t + A u_x = 0`; `A` is decomposed once.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem<const M: usize> {
    a: Matrix<M>,
    eigen: EigenDecomposition<M>,
}

impl<const M: usize> LinearSystem<M> {
    pub fn new(a: Matrix<M>) -> Result<Self> {
        let eigen = linear_system_eigen(&a)?;
        Ok(Self { a, eigen })
    }

    pub fn matrix(&self) -> &Matrix<M> {
        &self.a
    }

    pub fn decomposition(&self) -> &EigenDecomposition<M> {
        &self.eigen
    }
}

impl LinearSystem<3> {
    /// The coupled three-wave system with eigenvalues −2, 3, 5 used in the
    /// convergence experiments.
    pub fn three_wave() -> Self {
        Self::new(three_wave_matrix()).expect("three-wave matrix is hyperbolic")
    }
}

pub fn three_wave_matrix() -> Matrix<3> {
    Matrix::<3>::new(4.0, 2.5, -7.0, -1.0, 0.5, 7.0, -0.5, 1.25, 1.5)
}

/// `A = Q Λ Q⁻¹` with ascending real eigenvalues; fails for non-hyperbolic `A`.
pub fn linear_system_eigen<const M: usize>(a: &Matrix<M>) -> Result<EigenDecomposition<M>> {
    real_eigen_decomposition(a)
}

impl<const M: usize> ConservationLaw<M> for LinearSystem<M> {
    fn name(&self) -> &'static str {
        "linsys"
    }

    fn flux(&self, u: &Vector<M>) -> Vector<M> {
        self.a * u
    }

    fn jacobian(&self, _u: &Vector<M>) -> Matrix<M> {
        self.a
    }

    fn eigen(&self, _u: &Vector<M>) -> Result<EigenDecomposition<M>> {
        Ok(self.eigen.clone())
    }

    fn max_wave_speed(&self, _u: &Vector<M>) -> f64 {
        self.eigen.max_abs_eigenvalue()
    }

    fn is_linear(&self) -> bool {
        true
    }
}

/// Equation keys accepted by the configuration layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquationKey {
    Advection,
    Burgers,
    Linsys,
    Euler,
}

impl EquationKey {
    pub fn components(self) -> usize {
        match self {
            EquationKey::Advection | EquationKey::Burgers => 1,
            EquationKey::Linsys | EquationKey::Euler => 3,
        }
    }
}

impl std::str::FromStr for EquationKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "advection" => Ok(Self::Advection),
            "burgers" => Ok(Self::Burgers),
            "linsys" => Ok(Self::Linsys),
            "euler" => Ok(Self::Euler),
            other => Err(Error::Config(format!("unknown equation key '{other}'"))),
        }
    }
}
