//! The manufactured sources against a finite-difference residual of the PDE.

use cutcell_dg::equations::{
    manufactured_burgers, manufactured_euler, manufactured_linear_system, Burgers, ConservationLaw,
    Euler, LinearSystem, ManufacturedCase,
};
use cutcell_dg::linalg::Vector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest `|u_t + f(u)_x − g|` over 100 random points in (0, 1) × (0, 1).
fn worst_residual<const M: usize>(law: &dyn ConservationLaw<M>, case: &ManufacturedCase<M>, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 1e-5;
    let u = &case.exact;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (x, t): (f64, f64) = (rng.gen(), rng.gen_range(0.01..1.0));
        let ut = (u(x, t + d) - u(x, t - d)) / (2.0 * d);
        let fx = (law.flux(&u(x + d, t)) - law.flux(&u(x - d, t))) / (2.0 * d);
        let g: Vector<M> = (case.source)(x, t);
        worst = worst.max((ut + fx - g).amax());
    }
    worst
}

#[test]
fn burgers_source_matches_residual() {
    let r = worst_residual(&Burgers, &manufactured_burgers(), 1);
    assert!(r < 1e-6, "residual {r:e}");
}

#[test]
fn euler_source_matches_residual() {
    let r = worst_residual(&Euler::default(), &manufactured_euler(), 2);
    assert!(r < 1e-6, "residual {r:e}");
}

#[test]
fn linear_system_solution_has_zero_residual() {
    let r = worst_residual(&LinearSystem::three_wave(), &manufactured_linear_system(), 3);
    assert!(r < 1e-6, "residual {r:e}");
}
