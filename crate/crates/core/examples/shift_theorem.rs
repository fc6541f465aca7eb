//! Shifting a ring pattern is a rotation of each frequency's (cos, sin)
//! coefficient pair by kθ.
//!
//! cargo run --example shift_theorem

use std::f64::consts::TAU;

use grid_fisher::spectral::{self, CorrelationKernel, ModeCoefficients, SpectralDecomposition};

fn main() -> grid_fisher::Result<()> {
    let decomp = SpectralDecomposition::decompose(&CorrelationKernel::white(12, 1.0)?);
    let r = spectral::rotate_pattern(&decomp, &[ModeCoefficients::new(1, 1.0, 0.0)], 30f64.to_radians())?[0];
    println!("cos pattern shifted by 30 degrees = {:.3} cos + {:.3} sin", r.cos, r.sin);

    let n = 12;
    let v: Vec<f64> = (0..n).map(|i| ((i * 5 + 1) % 7) as f64).collect();
    let coeffs = spectral::project(&v);
    for m in [1i64, 5, -2] {
        let shifted = spectral::synthesize(n, &spectral::shift_by_steps(n, &coeffs, m));
        let err = (0..n)
            .map(|i| (shifted[i] - v[(i as i64 - m).rem_euclid(n as i64) as usize]).abs())
            .fold(0.0, f64::max);
        println!("shift by {m:+} neurons: max error vs index rotation {err:.1e}");
    }

    let half_step = spectral::rotate_pattern(&decomp, &[ModeCoefficients::new(2, 0.0, 1.0)], TAU / 24.0)?;
    println!("k=2 sine shifted half a neuron: {:?}", half_step[0]);
    Ok(())
}
