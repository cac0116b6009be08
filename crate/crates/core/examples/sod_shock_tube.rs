//! Sod's shock tube on a cut-cell mesh with P0 and with limited P1, compared
//! against the exact Riemann solution.

use cutcell_dg::harness::exact_riemann::sod_states;
use cutcell_dg::harness::{run_sod, ExactRiemann, RunConfig};

fn main() -> cutcell_dg::Result<()> {
    let (l, r) = sod_states();
    let exact = ExactRiemann::new(l, r, 1.4)?;
    println!("exact star state: p* = {:.5}, v* = {:.5}", exact.p_star(), exact.v_star());
    for p in [0, 1] {
        let report = run_sod(&RunConfig::sod(100, p, 42), |_, _, _| {})?;
        let d = report.diagnostics;
        println!(
            "P{p}: {} cells, {} steps, min rho {:.4}, min p {:.4}, TV(rho) {:.4}, L1(rho) {:.4e}",
            report.outcome.state.n_cells(),
            d.steps,
            d.min_density,
            d.min_pressure,
            d.total_variation,
            d.l1_density
        );
    }
    Ok(())
}
