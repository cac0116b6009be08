//! Discontinuous Galerkin solver for one-dimensional hyperbolic conservation
//! laws on cut-cell meshes, stabilized by domain-of-dependence penalty terms.
//!
//! The pieces fit together as follows:
//!
//! * [`mesh`] builds the cut-cell mesh,
//! * [`basis`] holds the modal Legendre space and the per-cell state,
//! * [`equations`] and [`riemann`] provide the conservation law and numerical flux,
//! * [`dod`] computes the penalty terms for each small cut cell,
//! * [`spatial`] assembles the semi-discrete right-hand side,
//! * [`marching`] and [`limiter`] advance it in time,
//! * [`spectral`] studies the eigenvalues of the linear operator,
//! * [`harness`] runs the experiments and writes reports.

pub mod basis;
pub mod dod;
pub mod equations;
pub mod error;
pub mod harness;
pub mod limiter;
pub mod linalg;
pub mod marching;
pub mod mesh;
pub mod riemann;
pub mod spatial;
pub mod spectral;

pub use basis::{DgSpace, DgState, Quadrature};
pub use error::{Error, Result};
pub use mesh::{AlphaSpec, CutCellMesh};
pub use spatial::{BoundaryCondition, SpatialOperator, Stabilization};
