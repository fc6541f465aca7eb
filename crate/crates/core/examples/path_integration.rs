//! Integrating many noisy displacement estimates: the position error
//! performs a random walk whose variance grows linearly with the number of
//! steps.
//!
//! cargo run --release --example path_integration

use grid_fisher::mcsim::{self, NoiseModel, PathConfig, SimMode};
use grid_fisher::spectral::{CorrelationKernel, SpectralDecomposition};
use grid_fisher::tuning;

fn main() -> grid_fisher::Result<()> {
    let decomp = SpectralDecomposition::decompose(&CorrelationKernel::new(4, vec![1.0, 0.5, 0.25])?);
    let pop = tuning::optimal_tuning_1d(&decomp, 1.0)?;
    let config = PathConfig {
        steps: 100,
        step_delta: 1e-3,
        theta: 0.0,
        trials: 10_000,
        seed: 3,
        mode: SimMode::TwoSnapshot,
    };
    let noisy = mcsim::run_path_integration(&pop, &NoiseModel::new(decomp.clone())?, &config)?;
    println!("single step variance {:.4}", noisy.single_step_variance);
    for s in [1usize, 10, 25, 50, 100] {
        println!(
            "after {s:>3} steps: variance {:>8.3}  ratio to steps x single step {:.3}",
            noisy.variance_by_step[s - 1],
            noisy.variance_by_step[s - 1] / (s as f64 * noisy.single_step_variance)
        );
    }
    let silent = mcsim::run_path_integration(&pop, &NoiseModel::silent(decomp), &config)?;
    println!(
        "without noise the final drift is {:.2e}",
        silent.mean_drift_by_step.last().copied().unwrap_or(0.0)
    );
    Ok(())
}
