//! Two-dimensional optimum. When the smallest eigenvalue and the smallest
//! k²λ fall on the same frequency all power goes there; otherwise the best
//! allocation can split power between two frequencies.
//!
//! cargo run --example optimize_2d

use grid_fisher::optimal::{self, Objective};
use grid_fisher::spectral::{CorrelationKernel, SpectralDecomposition};

fn report(name: &str, kernel: &CorrelationKernel) -> grid_fisher::Result<()> {
    let decomp = SpectralDecomposition::decompose(kernel);
    let cond = optimal::check_condition(&decomp)?;
    let best = optimal::maximize_fisher_2d(&decomp, 1.0)?;
    let audit = optimal::audit_random_allocations(&decomp, 1.0, Objective::Fi2dX, 100_000, 7)?;
    let weights: Vec<String> = best
        .allocation
        .weights()
        .iter()
        .map(|(k, w)| format!("k={k}:{w:.4}"))
        .collect();
    println!(
        "{name}: argmin lambda k={}, argmin k^2 lambda k={}, concentration {}",
        cond.argmin_lambda, cond.argmin_k2lambda, cond.concentration_valid
    );
    println!(
        "  I_x={:.5} via {:?} with [{}]; best random allocation {:.5}",
        best.achieved_fi,
        best.method,
        weights.join(", "),
        audit.max_value
    );
    Ok(())
}

fn main() -> grid_fisher::Result<()> {
    report("n=4 explicit", &CorrelationKernel::new(4, vec![1.0, 0.5, 0.25])?)?;
    report("white noise", &CorrelationKernel::white(8, 1.0)?)?;
    report("exponential rho=0.9", &CorrelationKernel::exponential(16, 1.0, 0.9)?)?;
    report("split optimum", &CorrelationKernel::from_spectrum(5, &[2.0, 1.0, 0.5])?)?;
    Ok(())
}
