//! Fisher-information optimal population codes on rings and tori.
//!
//! A ring of `n` neurons observes a small displacement of a stimulus under
//! Gaussian noise whose covariance depends only on ring distance. Such a
//! covariance is circulant and symmetric, so its eigenvectors are sampled
//! cosines and sines and every non-trivial eigenvalue comes with a
//! 90°-shifted partner. This crate builds on that structure:
//!
//! - [`spectral`]: circulant kernels, their closed-form eigenmodes, inversion,
//!   coefficient rotation and the separable torus extension.
//! - [`tuning`]: populations described as power allocations over eigenmodes,
//!   the optimal sinusoidal (1D) and rectangular-grid (2D) constructions and
//!   sampled 2D firing fields.
//! - [`fisher`]: Fisher information in quadratic and spectral form, its
//!   θ-derivative, the 2D product form with the cross term, and Cramér–Rao
//!   bounds.
//! - [`optimal`]: maximization over power allocations, the frequency-ordering
//!   condition for 2D concentration and random-simplex audits.
//! - [`mcsim`]: Monte Carlo displacement estimation against the Cramér–Rao
//!   bound and multi-step path integration.
//! - [`cli`] and [`formats`]: the `grid-fisher` command-line surface and the
//!   files it reads and writes.
//!
//! ```
//! use grid_fisher::spectral::{CorrelationKernel, SpectralDecomposition};
//! use grid_fisher::{fisher, tuning};
//!
//! let kernel = CorrelationKernel::new(4, vec![1.0, 0.5, 0.25]).unwrap();
//! let decomp = SpectralDecomposition::decompose(&kernel);
//! let pop = tuning::optimal_tuning_1d(&decomp, 1.0).unwrap();
//! let fi = fisher::fisher_1d(&pop, &decomp, 0.3).unwrap();
//! assert!((fi - 4.0 / 3.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod error;
pub mod fisher;
pub mod formats;
pub mod mcsim;
pub mod optimal;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod tolerance;
pub mod tuning;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
