//! Firing fields of torus neurons for frequencies 1 to 4, written as PGM
//! images. Each field has k² bumps per period.
//!
//! cargo run --example grid_field_2d -- [output-dir]

use std::fs::File;
use std::path::PathBuf;

use grid_fisher::formats;
use grid_fisher::tuning::{self, PowerAllocation, TuningPopulation1D, TuningPopulation2D};

fn main() -> grid_fisher::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "grid_fields".into()));
    std::fs::create_dir_all(&out)?;
    let n = 12;
    for k in 1..=4 {
        let axis = TuningPopulation1D::new(n, PowerAllocation::single(n, k, 1.0)?)?;
        let pop = TuningPopulation2D::same_shape(axis, 0.0);
        let lifted = tuning::firing_field_2d_with_offset(&pop, (0, 0), 128, tuning::axis_amplitude(pop.x()))?;
        let signed = tuning::firing_field_2d(&pop, (0, 0), 128)?;
        let path = out.join(format!("field_k{k}.pgm"));
        formats::write_pgm(&lifted, File::create(&path)?)?;
        println!(
            "k={k}: {} bumps (signed product has {}), wrote {}",
            lifted.toroidal_local_maxima().len(),
            signed.toroidal_local_maxima().len(),
            path.display()
        );
    }

    let axis = TuningPopulation1D::new(n, PowerAllocation::single(n, 2, 1.0)?)?;
    let report = tuning::shifted_copy_check(&axis, 64);
    println!("neighbouring neurons are shifted copies: max error {:.1e}", report.max_abs_error);
    Ok(())
}
