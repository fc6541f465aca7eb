//! Optimal ring population: all signal power on the paired frequency with
//! the smallest noise eigenvalue, checked against random allocations.
//!
//! cargo run --example optimal_tuning_1d

use grid_fisher::optimal::{self, Objective};
use grid_fisher::spectral::{CorrelationKernel, SpectralDecomposition};
use grid_fisher::{fisher, tuning};

fn main() -> grid_fisher::Result<()> {
    let power = 1.0;
    for rho in [0.2, 0.5, 0.8] {
        let kernel = CorrelationKernel::exponential(12, 1.0, rho)?;
        let decomp = SpectralDecomposition::decompose(&kernel);
        let best = optimal::maximize_fisher_1d(&decomp, power)?;
        let pop = tuning::optimal_tuning_1d(&decomp, power)?;
        let audit = optimal::audit_random_allocations(&decomp, power, Objective::Fi1d, 10_000, 1)?;
        println!(
            "rho={rho}: k*={} FI={:.4} (quadratic form {:.4}), best of 10000 random allocations {:.4}",
            best.allocation.entries()[0].k,
            best.achieved_fi,
            fisher::fisher_1d(&pop, &decomp, 0.0)?,
            audit.max_value,
        );
    }

    let kernel = CorrelationKernel::new(4, vec![1.0, 0.5, 0.25])?;
    let decomp = SpectralDecomposition::decompose(&kernel);
    let pop = tuning::optimal_tuning_1d(&decomp, power)?;
    println!("\nn=4 tuning curves at theta = 0, pi/2:");
    for theta in [0.0, std::f64::consts::FRAC_PI_2] {
        let r: Vec<String> = (0..4).map(|i| format!("{:+.4}", pop.neuron_response(i, theta))).collect();
        println!("  {}", r.join(" "));
    }
    Ok(())
}
