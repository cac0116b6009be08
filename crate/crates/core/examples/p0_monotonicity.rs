//! Piecewise constant Burgers on a mesh with one tiny cut cell: random data
//! stays within its initial range over many explicit Euler steps.

use std::sync::Arc;

use cutcell_dg::equations::Burgers;
use cutcell_dg::mesh::model_mesh;
use cutcell_dg::riemann::GodunovBurgers;
use cutcell_dg::{BoundaryCondition, DgSpace, DgState, SpatialOperator, Stabilization};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cutcell_dg::Result<()> {
    let (n, nu) = (40, 0.4);
    let mesh = model_mesh(n, 17, 1e-5, (0.0, 1.0))?;
    let h = mesh.h();
    let space = DgSpace::new(Arc::new(mesh), 0);
    let op = SpatialOperator::new(
        space.clone(),
        Arc::new(Burgers),
        Arc::new(GodunovBurgers),
        BoundaryCondition::Periodic,
        Stabilization::with_nu(nu),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut u = DgState::<1>::zeros(space.mesh().n_cells(), 0);
    for j in 0..u.n_cells() {
        u.set_average(j, 0, rng.gen_range(-1.0..1.0));
    }
    let range = |u: &DgState<1>| {
        (0..u.n_cells())
            .map(|j| u.average(j)[0])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    };
    let (lo, hi) = range(&u);
    println!("initial range [{lo:.6}, {hi:.6}]");
    for step in 1..=1000 {
        let dt = nu * h / op.max_wave_speed(&u);
        let du = op.rhs_state(&u, 0.0)?;
        for (c, d) in u.as_mut_slice().iter_mut().zip(du.as_slice()) {
            *c += dt * d;
        }
        if step % 200 == 0 {
            let (a, b) = range(&u);
            println!("step {step:>4}: range [{a:.6}, {b:.6}], small cell {:+.6}", u.average(16)[0]);
        }
    }
    Ok(())
}
