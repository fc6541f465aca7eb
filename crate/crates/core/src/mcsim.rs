//! Monte Carlo displacement estimation under circulant Gaussian noise.
//!
//! Noise is drawn in the eigenbasis: one standard normal per eigenvector,
//! scaled by `√λ`. Every trial owns an RNG stream keyed by `(seed, trial)`,
//! so results do not depend on how rayon schedules the work.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher;
use crate::rng::stream_rng;
use crate::spectral::{self, ModeCoefficients, SpectralDecomposition, TorusCorrelation};
use crate::stats;
use crate::tuning::{self, MeanResponse, TuningPopulation1D, TuningPopulation2D};

pub const MIN_TRIALS: usize = 100;
pub const DEFAULT_DELTA_THETA: f64 = 1e-3;
/// Above this `k·δθ` the local estimator's linearization error is reported.
pub const LINEARIZATION_WARNING: f64 = 0.1;

/// Gaussian noise with circulant covariance on a ring.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    decomp: SpectralDecomposition,
    silent: bool,
}

impl NoiseModel {
    pub fn new(decomp: SpectralDecomposition) -> Result<Self> {
        let report = decomp.validate_psd();
        if !report.valid {
            return Err(Error::NotPsd {
                k: report.argmin_frequency,
                lambda: report.min_eigenvalue,
            });
        }
        Ok(Self { decomp, silent: false })
    }

    /// A model whose draws are all zero. Estimators still use the kernel.
    pub fn silent(decomp: SpectralDecomposition) -> Self {
        Self { decomp, silent: true }
    }

    pub fn decomp(&self) -> &SpectralDecomposition {
        &self.decomp
    }

    pub fn is_silent(&self) -> bool {
        self.silent
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.decomp.n();
        if self.silent {
            return vec![0.0; n];
        }
        let coeffs: Vec<ModeCoefficients> = self
            .decomp
            .modes()
            .iter()
            .map(|m| {
                let scale = m.eigenvalue.max(0.0).sqrt();
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = if m.paired { rng.sample(StandardNormal) } else { 0.0 };
                ModeCoefficients::new(m.frequency, scale * a, scale * b)
            })
            .collect();
        spectral::synthesize(n, &coeffs)
    }
}

/// Separable noise on an `n × n` torus, flattened as `i·n + j`.
#[derive(Debug, Clone)]
pub struct TorusNoiseModel {
    correlation: TorusCorrelation,
    /// Columns are `√λ_m v_m` for the axis eigenvectors.
    factor: DMatrix<f64>,
}

impl TorusNoiseModel {
    pub fn new(correlation: TorusCorrelation) -> Result<Self> {
        let axis = correlation.axis();
        let report = axis.validate_psd();
        if !report.valid {
            return Err(Error::NotPsd {
                k: report.argmin_frequency,
                lambda: report.min_eigenvalue,
            });
        }
        let n = axis.n();
        let vectors = axis.eigenvectors();
        let factor = DMatrix::from_fn(n, n, |i, m| vectors[m].0.max(0.0).sqrt() * vectors[m].1[i]);
        Ok(Self { correlation, factor })
    }

    pub fn correlation(&self) -> &TorusCorrelation {
        &self.correlation
    }

    /// `B Z Bᵀ` with `Z` standard normal, which has covariance `C ⊗ C`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.correlation.n();
        let z = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = &self.factor * z * self.factor.transpose();
        (0..n * n).map(|idx| x[(idx / n, idx % n)]).collect()
    }
}

/// `f(θ) + noise`.
pub fn sample_response<P, R>(pop: &P, theta: f64, noise: &NoiseModel, rng: &mut R) -> Vec<f64>
where
    P: MeanResponse + ?Sized,
    R: Rng + ?Sized,
{
    let mut r = pop.mean_response(theta);
    for (x, e) in r.iter_mut().zip(noise.sample(rng)) {
        *x += e;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// One noisy snapshot after the move; the mean before it is known.
    KnownReference,
    /// Independent noisy snapshots before and after the move.
    TwoSnapshot,
}

impl SimMode {
    /// CRB multiplier: 1 for a known reference, 2 for two snapshots.
    pub fn crb_factor(self) -> f64 {
        match self {
            SimMode::KnownReference => 1.0,
            SimMode::TwoSnapshot => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    LocalLinear,
    Phase,
}

impl Estimator {
    pub fn label(self) -> &'static str {
        match self {
            Estimator::LocalLinear => "local_linear",
            Estimator::Phase => "phase (reference-free stand-in decoder)",
        }
    }
}

/// Locally efficient linear estimator around a known location:
/// `δθ̂ = ḟᵀC⁻¹Δr / ḟᵀC⁻¹ḟ`.
#[derive(Debug, Clone)]
pub struct LocalLinearEstimator {
    reference: Vec<f64>,
    weights: Vec<f64>,
    information: f64,
}

impl LocalLinearEstimator {
    pub fn new<P>(pop: &P, derivative: &[f64], decomp: &SpectralDecomposition, theta_ref: f64) -> Result<Self>
    where
        P: MeanResponse + ?Sized,
    {
        let c_inv_fdot = decomp.apply_inverse(derivative)?;
        Self::from_parts(pop.mean_response(theta_ref), derivative, c_inv_fdot)
    }

    pub fn for_ring(pop: &TuningPopulation1D, decomp: &SpectralDecomposition, theta_ref: f64) -> Result<Self> {
        Self::new(pop, &pop.mean_derivative(theta_ref), decomp, theta_ref)
    }

    fn from_parts(reference: Vec<f64>, derivative: &[f64], c_inv_fdot: Vec<f64>) -> Result<Self> {
        let information: f64 = derivative.iter().zip(&c_inv_fdot).map(|(a, b)| a * b).sum();
        if information.is_nan() || information <= 0.0 {
            return Err(Error::NonpositiveInformation(information));
        }
        let weights = c_inv_fdot.iter().map(|w| w / information).collect();
        Ok(Self {
            reference,
            weights,
            information,
        })
    }

    pub fn information(&self) -> f64 {
        self.information
    }

    /// `r_minus = None` uses the exact mean at the reference location.
    pub fn estimate(&self, r_minus: Option<&[f64]>, r_plus: &[f64]) -> f64 {
        let minus = r_minus.unwrap_or(&self.reference);
        self.weights
            .iter()
            .zip(r_plus.iter().zip(minus))
            .map(|(w, (p, m))| w * (p - m))
            .sum()
    }
}

/// One-shot form of [`LocalLinearEstimator`].
pub fn estimate_local(
    pop: &TuningPopulation1D,
    decomp: &SpectralDecomposition,
    theta_ref: f64,
    r_minus: Option<&[f64]>,
    r_plus: &[f64],
) -> Result<f64> {
    if r_plus.len() != pop.n() || r_minus.is_some_and(|r| r.len() != pop.n()) {
        return Err(Error::DimensionMismatch {
            expected: pop.n(),
            got: if r_plus.len() != pop.n() { r_plus.len() } else { r_minus.map_or(0, <[f64]>::len) },
        });
    }
    Ok(LocalLinearEstimator::for_ring(pop, decomp, theta_ref)?.estimate(r_minus, r_plus))
}

/// Phase of `r` at the population's single frequency `k`, in `[0, 2π/k)`.
/// Differences of two calls estimate a displacement without a reference
/// location.
pub fn estimate_phase(pop: &TuningPopulation1D, r: &[f64]) -> Result<f64> {
    let entry = single_entry(pop)?;
    let n = pop.n();
    if r.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: r.len() });
    }
    let (mut a, mut b) = (0.0, 0.0);
    for (i, &x) in r.iter().enumerate() {
        a += x * spectral::cos_basis(n, entry.k, i);
        b += x * spectral::sin_basis(n, entry.k, i);
    }
    let k = entry.k as f64;
    Ok(((a.atan2(-b) - entry.phase) / k).rem_euclid(TAU / k))
}

fn single_entry(pop: &TuningPopulation1D) -> Result<tuning::AllocationEntry> {
    match pop.allocation().entries() {
        [e] => Ok(*e),
        other => Err(Error::MultiModePopulation(other.len())),
    }
}

/// Wraps a phase difference into `[-π/k, π/k)`.
fn wrap_difference(d: f64, k: usize) -> f64 {
    let period = TAU / k as f64;
    (d + 0.5 * period).rem_euclid(period) - 0.5 * period
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub delta_theta: f64,
    /// Location before the move.
    pub theta: f64,
    pub trials: usize,
    pub seed: u64,
    pub mode: SimMode,
    pub estimator: Estimator,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            delta_theta: DEFAULT_DELTA_THETA,
            theta: 0.0,
            trials: 10_000,
            seed: 0,
            mode: SimMode::KnownReference,
            estimator: Estimator::LocalLinear,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::InvalidConfig(format!(
                "trials must be at least {MIN_TRIALS}, got {}",
                self.trials
            )));
        }
        if !self.delta_theta.is_finite() || !self.theta.is_finite() {
            return Err(Error::InvalidConfig("delta_theta and theta must be finite".into()));
        }
        Ok(())
    }
}

/// Warnings for a displacement that strains the linearization.
pub fn linearization_warnings(pop: &TuningPopulation1D, delta_theta: f64) -> Vec<String> {
    let k = pop.allocation().max_frequency().unwrap_or(0);
    let product = k as f64 * delta_theta.abs();
    if product > LINEARIZATION_WARNING {
        vec![format!(
            "k*delta_theta = {product:.3} exceeds {LINEARIZATION_WARNING}; the local estimator is biased at this displacement"
        )]
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub estimator: String,
    pub mode: SimMode,
    pub trials: usize,
    pub seed: u64,
    pub delta_theta: f64,
    pub mean_estimate: f64,
    pub empirical_variance: f64,
    pub bias: f64,
    pub fisher_information: f64,
    /// `1/I` for a known reference, `2/I` for two snapshots.
    pub crb_reference: f64,
    /// `crb_reference / empirical_variance`.
    pub efficiency: f64,
    pub variance_stderr: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub result: SimResult,
    /// Per-trial estimates in trial order.
    pub estimates: Vec<f64>,
}

/// Draws the snapshots of one step in a fixed order: after, then before.
struct StepSampler<'a> {
    pop: &'a TuningPopulation1D,
    noise: &'a NoiseModel,
    mode: SimMode,
    estimator: Estimator,
}

impl StepSampler<'_> {
    fn step(&self, local: &LocalLinearEstimator, theta: f64, delta: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
        let plus = sample_response(self.pop, theta + delta, self.noise, rng);
        let minus = match self.mode {
            SimMode::KnownReference => None,
            SimMode::TwoSnapshot => Some(sample_response(self.pop, theta, self.noise, rng)),
        };
        match self.estimator {
            Estimator::LocalLinear => Ok(local.estimate(minus.as_deref(), &plus)),
            Estimator::Phase => {
                let k = single_entry(self.pop)?.k;
                let before = match &minus {
                    Some(m) => estimate_phase(self.pop, m)?,
                    None => estimate_phase(self.pop, &self.pop.mean_response(theta))?,
                };
                Ok(wrap_difference(estimate_phase(self.pop, &plus)? - before, k))
            }
        }
    }
}

fn summarize(
    estimates: &[f64],
    config: &SimConfig,
    information: f64,
    estimator: Estimator,
    warnings: Vec<String>,
) -> SimResult {
    let mean_estimate = stats::mean(estimates);
    let empirical_variance = stats::sample_variance(estimates);
    let crb_reference = config.mode.crb_factor() / information;
    SimResult {
        estimator: estimator.label().to_string(),
        mode: config.mode,
        trials: estimates.len(),
        seed: config.seed,
        delta_theta: config.delta_theta,
        mean_estimate,
        empirical_variance,
        bias: mean_estimate - config.delta_theta,
        fisher_information: information,
        crb_reference,
        efficiency: crb_reference / empirical_variance,
        variance_stderr: stats::variance_stderr(empirical_variance, estimates.len()),
        warnings,
    }
}

/// Runs `config.trials` independent displacement estimates from
/// `config.theta` to `config.theta + config.delta_theta`.
pub fn run_displacement_trials(pop: &TuningPopulation1D, noise: &NoiseModel, config: &SimConfig) -> Result<SimRun> {
    config.validate()?;
    let decomp = noise.decomp();
    if pop.n() != decomp.n() {
        return Err(Error::DimensionMismatch {
            expected: decomp.n(),
            got: pop.n(),
        });
    }
    if config.estimator == Estimator::Phase {
        single_entry(pop)?;
    }
    let local = LocalLinearEstimator::for_ring(pop, decomp, config.theta)?;
    let information = fisher::fisher_1d(pop, decomp, config.theta)?;
    let sampler = StepSampler {
        pop,
        noise,
        mode: config.mode,
        estimator: config.estimator,
    };
    let estimates = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(config.seed, t as u64);
            sampler.step(&local, config.theta, config.delta_theta, &mut rng)
        })
        .collect::<Result<Vec<f64>>>()?;
    let warnings = linearization_warnings(pop, config.delta_theta);
    Ok(SimRun {
        result: summarize(&estimates, config, information, config.estimator, warnings),
        estimates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub steps: usize,
    pub step_delta: f64,
    /// Starting location.
    pub theta: f64,
    pub trials: usize,
    pub seed: u64,
    pub mode: SimMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub steps: usize,
    pub trials: usize,
    pub step_delta: f64,
    /// Mean accumulated error after each step.
    pub mean_drift_by_step: Vec<f64>,
    /// Variance of the accumulated error after each step.
    pub variance_by_step: Vec<f64>,
    pub final_variance: f64,
    /// Variance of individual step estimates pooled over all steps.
    pub single_step_variance: f64,
    /// `final_variance / (steps · single_step_variance)`; 1 for a random walk.
    pub linear_growth_ratio: f64,
}

/// Integrates `steps` local displacement estimates per trial with fresh
/// noise at every step. Each step's estimator is centred on the true
/// location, so errors do not feed back into later references.
pub fn run_path_integration(pop: &TuningPopulation1D, noise: &NoiseModel, config: &PathConfig) -> Result<PathReport> {
    if config.steps == 0 {
        return Err(Error::InvalidConfig("path integration needs at least one step".into()));
    }
    if config.trials < 2 {
        return Err(Error::InvalidConfig("path integration needs at least two trials".into()));
    }
    let decomp = noise.decomp();
    let locals = (0..config.steps)
        .map(|s| LocalLinearEstimator::for_ring(pop, decomp, config.theta + s as f64 * config.step_delta))
        .collect::<Result<Vec<_>>>()?;
    let sampler = StepSampler {
        pop,
        noise,
        mode: config.mode,
        estimator: Estimator::LocalLinear,
    };
    // Row t holds the per-step estimates of trial t.
    let rows = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(config.seed, t as u64);
            locals
                .iter()
                .enumerate()
                .map(|(s, local)| {
                    let theta = config.theta + s as f64 * config.step_delta;
                    sampler.step(local, theta, config.step_delta, &mut rng)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut errors = vec![0.0; config.trials];
    let mut mean_drift_by_step = Vec::with_capacity(config.steps);
    let mut variance_by_step = Vec::with_capacity(config.steps);
    for s in 0..config.steps {
        for (e, row) in errors.iter_mut().zip(&rows) {
            *e += row[s] - config.step_delta;
        }
        mean_drift_by_step.push(stats::mean(&errors));
        variance_by_step.push(stats::sample_variance(&errors));
    }
    let pooled: Vec<f64> = (0..config.steps)
        .map(|s| {
            let column: Vec<f64> = rows.iter().map(|r| r[s]).collect();
            stats::sample_variance(&column)
        })
        .collect();
    let single_step_variance = stats::mean(&pooled);
    let final_variance = *variance_by_step.last().expect("steps >= 1");
    Ok(PathReport {
        steps: config.steps,
        trials: config.trials,
        step_delta: config.step_delta,
        mean_drift_by_step,
        variance_by_step,
        final_variance,
        single_step_variance,
        linear_growth_ratio: final_variance / (config.steps as f64 * single_step_variance),
    })
}

/// Estimates an x-displacement on the torus with `θy` known. Reports the
/// bound `1/I_x` (or `2/I_x`).
pub fn run_axis_displacement_trials_2d(
    pop: &TuningPopulation2D,
    noise: &TorusNoiseModel,
    config: &SimConfig,
    theta_y: f64,
) -> Result<SimRun> {
    config.validate()?;
    let torus = noise.correlation();
    if pop.n() != torus.n() {
        return Err(Error::DimensionMismatch {
            expected: torus.n(),
            got: pop.n(),
        });
    }
    let derivative = tuning::outer(&pop.x().mean_derivative(config.theta), &pop.y().mean_response(theta_y));
    let c_inv = torus.apply_inverse(&derivative)?;
    let local = LocalLinearEstimator::from_parts(pop.mean_response(config.theta, theta_y), &derivative, c_inv)?;
    let information = local.information();
    let estimates: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(config.seed, t as u64);
            let mut plus = pop.mean_response(config.theta + config.delta_theta, theta_y);
            for (x, e) in plus.iter_mut().zip(noise.sample(&mut rng)) {
                *x += e;
            }
            let minus = match config.mode {
                SimMode::KnownReference => None,
                SimMode::TwoSnapshot => {
                    let mut m = pop.mean_response(config.theta, theta_y);
                    for (x, e) in m.iter_mut().zip(noise.sample(&mut rng)) {
                        *x += e;
                    }
                    Some(m)
                }
            };
            local.estimate(minus.as_deref(), &plus)
        })
        .collect();
    Ok(SimRun {
        result: summarize(&estimates, config, information, Estimator::LocalLinear, linearization_warnings(pop.x(), config.delta_theta)),
        estimates,
    })
}
