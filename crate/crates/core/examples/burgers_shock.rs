//! Burgers with a sine wave that steepens into shocks: bounds of the solution
//! for P0, P3 without limiter and P3 with limiter.

use cutcell_dg::harness::{run_burgers_shock, RunConfig};

fn main() -> cutcell_dg::Result<()> {
    for (p, limited) in [(0, false), (3, false), (3, true)] {
        let report = run_burgers_shock(&RunConfig::burgers_shock(p, limited), |_, _, _| {})?;
        let d = report.diagnostics;
        println!(
            "P{p}{:<9} steps {:>4}  averages [{:+.6}, {:+.6}]  overshoot {:.2e}  at points {:.2e}",
            if limited { " limited" } else { "" },
            d.steps,
            d.min_average,
            d.max_average,
            d.overshoot,
            d.point_overshoot
        );
    }
    Ok(())
}
