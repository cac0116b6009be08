//! The three-wave linear system with the exact Riemann flux: errors and observed orders on the banded cut-cell mesh for
//! constant and random cut fractions.

use cutcell_dg::harness::{run_convergence, ConvergenceCase};
use cutcell_dg::AlphaSpec;

fn main() {
    let modes = [AlphaSpec::constant(1e-1), AlphaSpec::constant(1e-6), AlphaSpec::random(42)];
    for alpha in &modes {
        for report in run_convergence(ConvergenceCase::LinearSystem, alpha, &[0, 1, 2, 3], &[20, 40, 80, 160]) {
            println!("{report}");
        }
    }
}
