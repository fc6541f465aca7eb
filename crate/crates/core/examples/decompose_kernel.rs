//! Eigenvalues of a few circulant kernels and whether they are valid
//! covariances.
//!
//! cargo run --example decompose_kernel

use grid_fisher::spectral::{CorrelationKernel, SpectralDecomposition};

fn show(name: &str, kernel: &CorrelationKernel) {
    let decomp = SpectralDecomposition::decompose(kernel);
    let psd = decomp.validate_psd();
    println!("{name} (n={}):", kernel.n());
    for m in decomp.modes() {
        let kind = if m.paired { "pair" } else { "single" };
        println!("  k={:<2} lambda={:>10.6} {kind}", m.frequency, m.eigenvalue);
    }
    println!(
        "  min eigenvalue {:.3e} at k={}, psd={}, invertible={}\n",
        psd.min_eigenvalue, psd.argmin_frequency, psd.valid, psd.strictly_positive
    );
}

fn main() -> grid_fisher::Result<()> {
    show("explicit [1, 0.5, 0.25]", &CorrelationKernel::new(4, vec![1.0, 0.5, 0.25])?);
    show("exponential rho=0.5", &CorrelationKernel::exponential(8, 1.0, 0.5)?);
    show("gaussian length=1", &CorrelationKernel::gaussian(12, 1.0, 1.0)?);
    show("not a covariance", &CorrelationKernel::new(6, vec![1.0, 0.9, 0.0, 0.9])?);

    match CorrelationKernel::gaussian(16, 1.0, 2.0) {
        Ok(_) => println!("wide gaussian accepted"),
        Err(e) => println!("wide gaussian rejected: {e}"),
    }
    Ok(())
}
