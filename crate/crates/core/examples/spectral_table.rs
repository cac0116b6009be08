//! Spectral abscissa of the stabilized advection operator for the full and the
//! legacy volume penalty, on a mesh where every cell in (0.1, 0.9) is split.

use std::time::Instant;

use cutcell_dg::dod::VolumeVariant;
use cutcell_dg::spectral::{spectral_abscissa, study_matrix};

fn main() -> cutcell_dg::Result<()> {
    println!("{:>3} {:>8} {:>12} {:>12} {:>8}", "p", "alpha", "full", "legacy", "secs");
    for p in 1..=3 {
        for alpha in [1e-1, 1e-6] {
            let start = Instant::now();
            let full = spectral_abscissa(&study_matrix(p, alpha, VolumeVariant::Full)?.matrix)?;
            let legacy = spectral_abscissa(&study_matrix(p, alpha, VolumeVariant::Legacy)?.matrix)?;
            println!(
                "{p:>3} {alpha:>8.0e} {:>12.3e} {:>12.3e} {:>8.2}",
                full.abscissa,
                legacy.abscissa,
                start.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
