//! Tuning-curve populations expressed as power allocations over eigenmodes.
//!
//! A population on a ring of `n` neurons is fixed by a list of
//! `(k, T_k, c_k)` entries. Its mean-response derivative is
//!
//! ```text
//! ḟ(θ) = Σ_k T_k cos(kθ + c_k) w_k + T_k sin(kθ + c_k) w'_k
//! f(θ) = Σ_k (T_k/k) sin(kθ + c_k) w_k − (T_k/k) cos(kθ + c_k) w'_k
//! ```
//!
//! with all integration constants zero, so every curve oscillates around 0.
//! Because the eigenvectors only depend on `n`, a population does not hold
//! a kernel; the noise enters when Fisher information is evaluated.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, is_paired, max_paired_frequency, ModeCoefficients, SpectralDecomposition};
use crate::tolerance::Tolerances;

/// Smallest and largest accepted firing-field resolution.
pub const MIN_FIELD_RESOLUTION: usize = 8;
pub const MAX_FIELD_RESOLUTION: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocationEntry {
    pub k: usize,
    pub amplitude: f64,
    pub phase: f64,
}

/// Signal power distributed over paired frequencies. The total power is
/// `Σ T_k²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    entries: Vec<AllocationEntry>,
    power: f64,
}

impl PowerAllocation {
    /// Entries are sorted by frequency. Every `k` must be a paired mode of a
    /// ring of `n` neurons and appear once.
    pub fn new(n: usize, mut entries: Vec<AllocationEntry>) -> Result<Self> {
        entries.sort_by_key(|e| e.k);
        for pair in entries.windows(2) {
            if pair[0].k == pair[1].k {
                return Err(Error::InvalidAllocation(format!("duplicate frequency k={}", pair[0].k)));
            }
        }
        for e in &entries {
            if !is_paired(n, e.k) {
                return Err(Error::UnpairedMode(e.k));
            }
            if !(e.amplitude >= 0.0 && e.amplitude.is_finite()) {
                return Err(Error::InvalidAllocation(format!(
                    "amplitude at k={} must be finite and nonnegative, got {}",
                    e.k, e.amplitude
                )));
            }
            if !e.phase.is_finite() {
                return Err(Error::InvalidAllocation(format!("phase at k={} is not finite", e.k)));
            }
        }
        let power = entries.iter().map(|e| e.amplitude * e.amplitude).sum();
        Ok(Self { entries, power })
    }

    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
            power: 0.0,
        }
    }

    /// All power on frequency `k` with phase 0.
    pub fn single(n: usize, k: usize, power: f64) -> Result<Self> {
        if !(power >= 0.0 && power.is_finite()) {
            return Err(Error::InvalidAllocation(format!("power must be nonnegative, got {power}")));
        }
        Self::new(
            n,
            vec![AllocationEntry {
                k,
                amplitude: power.sqrt(),
                phase: 0.0,
            }],
        )
    }

    /// From `(k, T_k²)` power weights, phases 0. Zero weights are dropped.
    pub fn from_weights(n: usize, weights: &[(usize, f64)]) -> Result<Self> {
        if let Some((k, w)) = weights.iter().find(|(_, w)| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidAllocation(format!("weight at k={k} is {w}")));
        }
        Self::new(
            n,
            weights
                .iter()
                .filter(|(_, w)| *w > 0.0)
                .map(|&(k, w)| AllocationEntry {
                    k,
                    amplitude: w.sqrt(),
                    phase: 0.0,
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[AllocationEntry] {
        &self.entries
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(k, T_k²)` pairs.
    pub fn weights(&self) -> Vec<(usize, f64)> {
        self.entries.iter().map(|e| (e.k, e.amplitude * e.amplitude)).collect()
    }

    pub fn max_frequency(&self) -> Option<usize> {
        self.entries.last().map(|e| e.k)
    }

    /// Same frequencies and phases, amplitudes multiplied by `factor`
    /// (power by `factor²`).
    pub fn scaled(&self, factor: f64) -> Self {
        let entries: Vec<AllocationEntry> = self
            .entries
            .iter()
            .map(|e| AllocationEntry {
                amplitude: e.amplitude * factor.abs(),
                ..*e
            })
            .collect();
        let power = entries.iter().map(|e| e.amplitude * e.amplitude).sum();
        Self { entries, power }
    }

    /// Every phase advanced by `k · shift`, wrapped to `[0, 2π)`.
    pub fn phase_shifted(&self, shift: f64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| AllocationEntry {
                    phase: (e.phase + e.k as f64 * shift).rem_euclid(TAU),
                    ..*e
                })
                .collect(),
            power: self.power,
        }
    }

    /// Amplitude spectrum, for comparing population shapes.
    pub fn amplitudes(&self) -> Vec<(usize, f64)> {
        self.entries.iter().map(|e| (e.k, e.amplitude)).collect()
    }
}

/// Anything that yields one mean response per neuron for a stimulus angle.
pub trait MeanResponse {
    fn neuron_count(&self) -> usize;
    fn mean_response(&self, theta: f64) -> Vec<f64>;
}

/// Ring population of `n` neurons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningPopulation1D {
    n: usize,
    allocation: PowerAllocation,
}

impl TuningPopulation1D {
    pub fn new(n: usize, allocation: PowerAllocation) -> Result<Self> {
        if let Some(e) = allocation.entries().iter().find(|e| !is_paired(n, e.k)) {
            return Err(Error::UnpairedMode(e.k));
        }
        Ok(Self { n, allocation })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn allocation(&self) -> &PowerAllocation {
        &self.allocation
    }

    /// Eigen-coordinates of `f(θ)`.
    pub fn response_coefficients(&self, theta: f64) -> Vec<ModeCoefficients> {
        let theta = theta.rem_euclid(TAU);
        self.allocation
            .entries()
            .iter()
            .map(|e| {
                let kf = e.k as f64;
                let (s, c) = (kf * theta + e.phase).sin_cos();
                ModeCoefficients::new(e.k, e.amplitude / kf * s, -e.amplitude / kf * c)
            })
            .collect()
    }

    /// Eigen-coordinates of `ḟ(θ)`: `β = (T cos, T sin)`.
    pub fn derivative_coefficients(&self, theta: f64) -> Vec<ModeCoefficients> {
        let theta = theta.rem_euclid(TAU);
        self.allocation
            .entries()
            .iter()
            .map(|e| {
                let (s, c) = (e.k as f64 * theta + e.phase).sin_cos();
                ModeCoefficients::new(e.k, e.amplitude * c, e.amplitude * s)
            })
            .collect()
    }

    /// Eigen-coordinates of `f̈(θ)`.
    pub fn second_derivative_coefficients(&self, theta: f64) -> Vec<ModeCoefficients> {
        let theta = theta.rem_euclid(TAU);
        self.allocation
            .entries()
            .iter()
            .map(|e| {
                let kf = e.k as f64;
                let (s, c) = (kf * theta + e.phase).sin_cos();
                ModeCoefficients::new(e.k, -e.amplitude * kf * s, e.amplitude * kf * c)
            })
            .collect()
    }

    pub fn mean_derivative(&self, theta: f64) -> Vec<f64> {
        spectral::synthesize(self.n, &self.derivative_coefficients(theta))
    }

    pub fn second_derivative(&self, theta: f64) -> Vec<f64> {
        spectral::synthesize(self.n, &self.second_derivative_coefficients(theta))
    }

    /// `ḟᵀḟ`; equals the allocation power at every θ.
    pub fn signal_power(&self, theta: f64) -> f64 {
        self.mean_derivative(theta).iter().map(|x| x * x).sum()
    }

    /// Response of a single neuron, evaluated without building the vector.
    pub fn neuron_response(&self, neuron: usize, theta: f64) -> f64 {
        let n = self.n;
        self.response_coefficients(theta)
            .iter()
            .map(|c| c.cos * spectral::cos_basis(n, c.k, neuron) + c.sin * spectral::sin_basis(n, c.k, neuron))
            .sum()
    }

    /// Tuning curves sampled on `thetas`; row `t` is `f(thetas[t])`.
    pub fn sample_curves(&self, thetas: &[f64]) -> Vec<Vec<f64>> {
        thetas.par_iter().map(|&t| self.mean_response(t)).collect()
    }
}

impl MeanResponse for TuningPopulation1D {
    fn neuron_count(&self) -> usize {
        self.n
    }

    fn mean_response(&self, theta: f64) -> Vec<f64> {
        spectral::synthesize(self.n, &self.response_coefficients(theta))
    }
}

/// Torus population with separable tuning `T_ij(θx, θy) = f_x,i(θx) f_y,j(θy)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningPopulation2D {
    x: TuningPopulation1D,
    y: TuningPopulation1D,
    phase_shift: f64,
}

impl TuningPopulation2D {
    /// The y axis copies the x shape with phases `d_k = c_k + k·phase_shift`.
    pub fn same_shape(x: TuningPopulation1D, phase_shift: f64) -> Self {
        let y = TuningPopulation1D {
            n: x.n,
            allocation: x.allocation.phase_shifted(phase_shift),
        };
        Self { x, y, phase_shift }
    }

    /// Builds from two explicit axes, which must share `n` and amplitude
    /// spectrum.
    pub fn from_axes(x: TuningPopulation1D, y: TuningPopulation1D) -> Result<Self> {
        if x.n != y.n {
            return Err(Error::AxisMismatch(format!("x has n={}, y has n={}", x.n, y.n)));
        }
        let (ax, ay) = (x.allocation.amplitudes(), y.allocation.amplitudes());
        let same = ax.len() == ay.len()
            && ax
                .iter()
                .zip(&ay)
                .all(|(a, b)| a.0 == b.0 && (a.1 - b.1).abs() <= Tolerances::DEFAULT.power * a.1.max(1.0));
        if !same {
            return Err(Error::AxisMismatch("x and y amplitude spectra differ".into()));
        }
        Ok(Self {
            x,
            y,
            phase_shift: 0.0,
        })
    }

    pub fn x(&self) -> &TuningPopulation1D {
        &self.x
    }

    pub fn y(&self) -> &TuningPopulation1D {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.n
    }

    pub fn phase_shift(&self) -> f64 {
        self.phase_shift
    }

    /// Mean response of neuron `(i, j)`.
    pub fn response(&self, neuron: (usize, usize), theta_x: f64, theta_y: f64) -> f64 {
        self.x.neuron_response(neuron.0, theta_x) * self.y.neuron_response(neuron.1, theta_y)
    }

    /// All `n²` responses at `(θx, θy)`, flat index `i·n + j`.
    pub fn mean_response(&self, theta_x: f64, theta_y: f64) -> Vec<f64> {
        outer(&self.x.mean_response(theta_x), &self.y.mean_response(theta_y))
    }
}

pub(crate) fn outer(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Concentrates power `p` on the paired frequency with the smallest
/// eigenvalue (ties toward smaller `k`), phase 0.
pub fn optimal_tuning_1d(decomp: &SpectralDecomposition, power: f64) -> Result<TuningPopulation1D> {
    decomp.require_invertible()?;
    let (k, _) = decomp
        .argmin_paired(|m| m.eigenvalue, Tolerances::DEFAULT.ordering)
        .ok_or(Error::NoPairedMode(decomp.n()))?;
    TuningPopulation1D::new(decomp.n(), PowerAllocation::single(decomp.n(), k, power)?)
}

/// Rectangular-grid optimum: both axes concentrate power `p` on the same
/// frequency. Requires the frequency minimizing `λ_k` to also minimize
/// `k² λ_k`; otherwise use [`crate::optimal::maximize_fisher_2d`].
pub fn optimal_tuning_2d(decomp: &SpectralDecomposition, power: f64) -> Result<TuningPopulation2D> {
    optimal_tuning_2d_shifted(decomp, power, 0.0)
}

pub fn optimal_tuning_2d_shifted(
    decomp: &SpectralDecomposition,
    power: f64,
    phase_shift: f64,
) -> Result<TuningPopulation2D> {
    decomp.require_invertible()?;
    let report = crate::optimal::check_condition(decomp)?;
    if !report.concentration_valid {
        return Err(Error::ConditionViolated {
            argmin_lambda: report.argmin_lambda,
            argmin_k2lambda: report.argmin_k2lambda,
        });
    }
    let x = TuningPopulation1D::new(
        decomp.n(),
        PowerAllocation::single(decomp.n(), report.argmin_lambda, power)?,
    )?;
    Ok(TuningPopulation2D::same_shape(x, phase_shift))
}

/// Sampled firing field on an `r × r` grid over `[0, 2π)²`; entry `(a, b)`
/// is the response at `θx = 2πa/r`, `θy = 2πb/r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    resolution: usize,
    values: Vec<f64>,
}

impl Field2D {
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.resolution + b]
    }

    /// Row-major values, row index `a` (θx).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Points strictly above all 8 neighbours, with wrap-around.
    pub fn toroidal_local_maxima(&self) -> Vec<(usize, usize)> {
        let r = self.resolution;
        let mut out = Vec::new();
        for a in 0..r {
            for b in 0..r {
                let v = self.get(a, b);
                let is_max = (0..3).all(|da| {
                    (0..3).all(|db| {
                        (da == 1 && db == 1) || v > self.get((a + r + da - 1) % r, (b + r + db - 1) % r)
                    })
                });
                if is_max {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

fn check_resolution(r: usize) -> Result<()> {
    if !(MIN_FIELD_RESOLUTION..=MAX_FIELD_RESOLUTION).contains(&r) {
        return Err(Error::ResolutionOutOfRange {
            r,
            min: MIN_FIELD_RESOLUTION,
            max: MAX_FIELD_RESOLUTION,
        });
    }
    Ok(())
}

/// Firing field of neuron `(i, j)`: the product of its two signed axis
/// tuning curves.
pub fn firing_field_2d(pop: &TuningPopulation2D, neuron: (usize, usize), resolution: usize) -> Result<Field2D> {
    firing_field_2d_with_offset(pop, neuron, resolution, 0.0)
}

/// As [`firing_field_2d`] with `offset` added to each axis curve before the
/// product. An offset equal to [`axis_amplitude`] makes both factors
/// nonnegative, which leaves one bump per period in each axis.
pub fn firing_field_2d_with_offset(
    pop: &TuningPopulation2D,
    neuron: (usize, usize),
    resolution: usize,
    offset: f64,
) -> Result<Field2D> {
    check_resolution(resolution)?;
    let n = pop.n();
    if neuron.0 >= n || neuron.1 >= n {
        return Err(Error::InvalidConfig(format!(
            "neuron ({}, {}) outside a {n}x{n} torus",
            neuron.0, neuron.1
        )));
    }
    let r = resolution;
    let angle = |a: usize| TAU * a as f64 / r as f64;
    let fx: Vec<f64> = (0..r).map(|a| pop.x.neuron_response(neuron.0, angle(a)) + offset).collect();
    let fy: Vec<f64> = (0..r).map(|b| pop.y.neuron_response(neuron.1, angle(b)) + offset).collect();
    Ok(Field2D {
        resolution: r,
        values: outer(&fx, &fy),
    })
}

/// Upper bound on `|f_i(θ)|` for any neuron: `sqrt(2/n) Σ T_k / k`.
pub fn axis_amplitude(pop: &TuningPopulation1D) -> f64 {
    let scale = (2.0 / pop.n as f64).sqrt();
    scale
        * pop
            .allocation
            .entries()
            .iter()
            .map(|e| e.amplitude / e.k as f64)
            .sum::<f64>()
}

/// Result of [`shifted_copy_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub passes: bool,
}

/// Checks `f_{j+1}(θ) = f_j(θ − 2π/n)` for every neuron (neuron 0 follows
/// neuron n−1) on `grid` uniform angles.
pub fn shifted_copy_check<P: MeanResponse + ?Sized>(pop: &P, grid: usize) -> ShiftReport {
    const TOLERANCE: f64 = 1e-9;
    let n = pop.neuron_count();
    let step = TAU / n as f64;
    let mut max_abs_error: f64 = 0.0;
    for t in 0..grid.max(1) {
        let theta = TAU * t as f64 / grid.max(1) as f64;
        let now = pop.mean_response(theta);
        let before = pop.mean_response(theta - step);
        for (j, b) in before.iter().enumerate() {
            max_abs_error = max_abs_error.max((now[(j + 1) % n] - b).abs());
        }
    }
    ShiftReport {
        max_abs_error,
        tolerance: TOLERANCE,
        passes: max_abs_error <= TOLERANCE,
    }
}

/// Paired frequencies available on a ring of `n`.
pub fn paired_frequencies(n: usize) -> std::ops::RangeInclusive<usize> {
    1..=max_paired_frequency(n)
}
