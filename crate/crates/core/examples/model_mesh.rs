//! One split cell in a uniform mesh: cell layout, stabilization weights and
//! the P0 update of a step profile.

use std::sync::Arc;

use cutcell_dg::dod::{compute_eta, stabilized_pairs};
use cutcell_dg::equations::Advection;
use cutcell_dg::linalg::Vector;
use cutcell_dg::mesh::model_mesh;
use cutcell_dg::riemann::Upwind;
use cutcell_dg::{BoundaryCondition, DgSpace, SpatialOperator, Stabilization};

fn main() -> cutcell_dg::Result<()> {
    let (n, k, alpha, nu) = (10, 5, 1e-3, 0.4);
    let mesh = model_mesh(n, k, alpha, (0.0, 1.0))?;
    println!("{} cells from {n} background cells, h = {}", mesh.n_cells(), mesh.h());
    for (j, cell) in mesh.cells().iter().enumerate() {
        println!("{j:>3} {:<6} [{:.6}, {:.6}]", cell.kind.as_str(), cell.left, cell.right);
    }
    for pair in stabilized_pairs(&mesh, nu) {
        println!("stabilized pair {:?}, eta = {:.6}", pair, compute_eta(alpha, nu));
    }

    let space = DgSpace::new(Arc::new(mesh), 0);
    let op = SpatialOperator::new(
        space.clone(),
        Arc::new(Advection { beta: 1.0 }),
        Arc::new(Upwind { beta: 1.0 }),
        BoundaryCondition::Periodic,
        Stabilization::with_nu(nu),
    )?;
    let u = space.project(|x| Vector::<1>::new(if x < 0.4 { 1.0 } else { 0.0 }));
    let du = op.rhs_state(&u, 0.0)?;
    let dt = nu * space.mesh().h();
    println!("\none explicit Euler step with dt = {dt}:");
    for j in 0..u.n_cells() {
        let (before, after) = (u.average(j)[0], u.average(j)[0] + dt * du.average(j)[0]);
        println!("{j:>3} {before:>8.4} -> {after:>8.4}");
    }
    Ok(())
}
