//! Fisher information of ring and torus populations: constant in θ for a
//! single frequency, product form on the torus, and no cross term.
//!
//! cargo run --example fisher_report

use std::f64::consts::TAU;

use grid_fisher::spectral::{CorrelationKernel, SpectralDecomposition};
use grid_fisher::tuning::{PowerAllocation, TuningPopulation1D, TuningPopulation2D};
use grid_fisher::{fisher, tuning};

fn main() -> grid_fisher::Result<()> {
    let kernel = CorrelationKernel::exponential(16, 1.0, 0.6)?;
    let decomp = SpectralDecomposition::decompose(&kernel);

    let single = tuning::optimal_tuning_1d(&decomp, 1.0)?;
    let mixed = TuningPopulation1D::new(16, PowerAllocation::from_weights(16, &[(1, 0.3), (4, 0.7)])?)?;
    let thetas: Vec<f64> = (0..64).map(|t| TAU * t as f64 / 64.0).collect();
    for (name, pop) in [("single", &single), ("mixed", &mixed)] {
        let report = fisher::fisher_report_1d(pop, &decomp, &thetas)?;
        println!(
            "{name}: FI={:.6} bound={:.6} CRB={:.6} relative variation over theta {:.1e} dI/dtheta(0.3)={:.1e}",
            report.fi_spectral,
            report.fi_max_bound,
            report.crb,
            report.max_relative_variation(),
            fisher::fisher_derivative(pop, &decomp, 0.3)?,
        );
    }

    let torus = TuningPopulation2D::same_shape(mixed, 0.7);
    for (tx, ty) in [(0.0, 0.0), (1.1, 2.3)] {
        let r = fisher::fisher_2d_at(&torus, &decomp, tx, ty)?;
        println!(
            "torus at ({tx}, {ty}): I_x={:.6} I_y={:.6} I_xy={:.1e} product form {:.6} min variance {:.6}",
            r.i_x, r.i_y, r.i_xy, r.product_form, r.minimum_variance
        );
    }
    Ok(())
}
