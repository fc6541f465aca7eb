//! Maximizing Fisher information over power allocations.
//!
//! With weights `a_k = T_k² ≥ 0`, `Σ a_k = P`, the 1D information is the
//! linear functional `Σ a_k/λ_k`, maximized at the vertex with the smallest
//! eigenvalue. The 2D x-information is the product of two linear functionals
//! `(Σ a_k/λ_k)(Σ a_k/(k²λ_k))`. Its restriction to any face of dimension
//! two or more has an indefinite (or rank-deficient) Hessian, so a maximum
//! is always found on a vertex or an edge of the simplex.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::spectral::SpectralDecomposition;
use crate::tolerance::Tolerances;
use crate::tuning::PowerAllocation;

/// Audit size used by [`maximize_fisher_1d`] and [`maximize_fisher_2d`].
pub const DEFAULT_AUDIT_TRIALS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// λ strictly decreasing over paired frequencies.
    pub lambda_order_ok: bool,
    /// k²λ strictly decreasing over paired frequencies.
    pub k2lambda_order_ok: bool,
    pub argmin_lambda: usize,
    pub argmin_k2lambda: usize,
    /// True when the two argmins agree, so concentrating all power on one
    /// frequency maximizes the 2D information.
    pub concentration_valid: bool,
    /// Another paired frequency ties the smallest eigenvalue.
    pub lambda_tie: bool,
}

/// Compares the λ and k²λ orderings over paired modes.
pub fn check_condition(decomp: &SpectralDecomposition) -> Result<ConditionReport> {
    let tol = Tolerances::DEFAULT.ordering;
    let k2lambda = |k: usize, lambda: f64| (k * k) as f64 * lambda;
    let paired: Vec<(usize, f64)> = decomp.paired_modes().map(|m| (m.frequency, m.eigenvalue)).collect();
    let (argmin_lambda, lambda_tie) = decomp
        .argmin_paired(|m| m.eigenvalue, tol)
        .ok_or(Error::NoPairedMode(decomp.n()))?;
    let (argmin_k2lambda, _) = decomp
        .argmin_paired(|m| k2lambda(m.frequency, m.eigenvalue), tol)
        .ok_or(Error::NoPairedMode(decomp.n()))?;
    let lambda_order_ok = paired.windows(2).all(|w| w[0].1 - w[1].1 > tol);
    let k2lambda_order_ok = paired
        .windows(2)
        .all(|w| k2lambda(w[0].0, w[0].1) - k2lambda(w[1].0, w[1].1) > tol);
    Ok(ConditionReport {
        lambda_order_ok,
        k2lambda_order_ok,
        argmin_lambda,
        argmin_k2lambda,
        concentration_valid: argmin_lambda == argmin_k2lambda,
        lambda_tie,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `Σ a/λ`
    Fi1d,
    /// `(Σ a/λ)(Σ a/(k²λ))`
    Fi2dX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    ClosedForm,
    VertexEdge,
    GradientRefined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationSearchResult {
    pub allocation: PowerAllocation,
    pub achieved_fi: f64,
    pub method: SearchMethod,
    /// Best audited value minus `achieved_fi`; nonpositive when the search
    /// dominates the audit.
    pub audit_margin: f64,
    pub audit_trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub audit_trials: usize,
    pub seed: u64,
    pub refine_iterations: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            audit_trials: DEFAULT_AUDIT_TRIALS,
            seed: 0,
            refine_iterations: 500,
        }
    }
}

/// Linear coefficients of the objectives over the paired modes.
struct Coefficients {
    ks: Vec<usize>,
    inv_lambda: Vec<f64>,
    inv_k2lambda: Vec<f64>,
}

impl Coefficients {
    fn new(decomp: &SpectralDecomposition) -> Result<Self> {
        decomp.require_invertible()?;
        let modes: Vec<_> = decomp.paired_modes().collect();
        if modes.is_empty() {
            return Err(Error::NoPairedMode(decomp.n()));
        }
        Ok(Self {
            ks: modes.iter().map(|m| m.frequency).collect(),
            inv_lambda: modes.iter().map(|m| 1.0 / m.eigenvalue).collect(),
            inv_k2lambda: modes
                .iter()
                .map(|m| 1.0 / ((m.frequency * m.frequency) as f64 * m.eigenvalue))
                .collect(),
        })
    }

    fn value(&self, objective: Objective, weights: &[f64]) -> f64 {
        let u: f64 = weights.iter().zip(&self.inv_lambda).map(|(a, c)| a * c).sum();
        match objective {
            Objective::Fi1d => u,
            Objective::Fi2dX => {
                let v: f64 = weights.iter().zip(&self.inv_k2lambda).map(|(a, c)| a * c).sum();
                u * v
            }
        }
    }

    fn allocation(&self, n: usize, weights: &[f64]) -> Result<PowerAllocation> {
        let pairs: Vec<(usize, f64)> = self.ks.iter().copied().zip(weights.iter().copied()).collect();
        PowerAllocation::from_weights(n, &pairs)
    }
}

/// Evaluates an objective for `(k, a_k)` weights.
pub fn objective_value(decomp: &SpectralDecomposition, objective: Objective, weights: &[(usize, f64)]) -> Result<f64> {
    let c = Coefficients::new(decomp)?;
    let mut dense = vec![0.0; c.ks.len()];
    for &(k, a) in weights {
        let idx = c.ks.iter().position(|&x| x == k).ok_or(Error::UnpairedMode(k))?;
        dense[idx] += a;
    }
    Ok(c.value(objective, &dense))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub objective: Objective,
    pub trials: usize,
    pub seed: u64,
    pub max_value: f64,
    pub min_value: f64,
    /// `(k, a_k)` of the best sampled point.
    pub best_weights: Vec<(usize, f64)>,
}

fn dirichlet_point(seed: u64, index: usize, dim: usize, power: f64) -> Vec<f64> {
    let mut rng = stream_rng(seed, index as u64);
    // Normalized unit exponentials are uniform on the simplex.
    let raw: Vec<f64> = (0..dim)
        .map(|_| {
            let u: f64 = rng.random();
            -(1.0 - u).ln()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| power * x / total).collect()
}

/// Samples `trials` points uniformly on `{a ≥ 0, Σ a = P}` over the paired
/// modes and reports the extreme objective values.
pub fn audit_random_allocations(
    decomp: &SpectralDecomposition,
    power: f64,
    objective: Objective,
    trials: usize,
    seed: u64,
) -> Result<AuditReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("audit needs at least one trial".into()));
    }
    let c = Coefficients::new(decomp)?;
    let dim = c.ks.len();
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| c.value(objective, &dirichlet_point(seed, i, dim, power)))
        .collect();
    let (best, max_value) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let best_weights = c.ks.iter().copied().zip(dirichlet_point(seed, best, dim, power)).collect();
    Ok(AuditReport {
        objective,
        trials,
        seed,
        max_value,
        min_value,
        best_weights,
    })
}

pub fn maximize_fisher_1d(decomp: &SpectralDecomposition, power: f64) -> Result<AllocationSearchResult> {
    maximize_fisher_1d_with(decomp, power, &SearchOptions::default())
}

/// All power on the paired frequency with the smallest eigenvalue.
pub fn maximize_fisher_1d_with(
    decomp: &SpectralDecomposition,
    power: f64,
    options: &SearchOptions,
) -> Result<AllocationSearchResult> {
    check_power(power)?;
    Coefficients::new(decomp)?;
    let (k, _) = decomp
        .argmin_paired(|m| m.eigenvalue, Tolerances::DEFAULT.ordering)
        .ok_or(Error::NoPairedMode(decomp.n()))?;
    let lambda = decomp.eigenvalue(k).expect("argmin is a mode");
    let achieved_fi = power / lambda;
    let audit_margin = audit_margin(decomp, power, Objective::Fi1d, achieved_fi, options)?;
    Ok(AllocationSearchResult {
        allocation: PowerAllocation::single(decomp.n(), k, power)?,
        achieved_fi,
        method: SearchMethod::ClosedForm,
        audit_margin,
        audit_trials: options.audit_trials,
    })
}

pub fn maximize_fisher_2d(decomp: &SpectralDecomposition, power: f64) -> Result<AllocationSearchResult> {
    maximize_fisher_2d_with(decomp, power, &SearchOptions::default())
}

/// Vertex and edge enumeration of the product objective, then projected
/// gradient ascent from the best point.
pub fn maximize_fisher_2d_with(
    decomp: &SpectralDecomposition,
    power: f64,
    options: &SearchOptions,
) -> Result<AllocationSearchResult> {
    check_power(power)?;
    let c = Coefficients::new(decomp)?;
    let condition = check_condition(decomp)?;
    let dim = c.ks.len();
    let objective = Objective::Fi2dX;

    let vertex = |i: usize| {
        let mut a = vec![0.0; dim];
        a[i] = power;
        a
    };

    let mut best = vertex(0);
    let mut best_value = c.value(objective, &best);
    for i in 1..dim {
        let a = vertex(i);
        let v = c.value(objective, &a);
        if v > best_value {
            best = a;
            best_value = v;
        }
    }
    let vertex_best = best_value;

    // Edge a = P(t e_i + (1−t) e_j): Q(t) = P²(u_j + t du)(v_j + t dv).
    for i in 0..dim {
        for j in (i + 1)..dim {
            let du = c.inv_lambda[i] - c.inv_lambda[j];
            let dv = c.inv_k2lambda[i] - c.inv_k2lambda[j];
            let curvature = du * dv;
            if curvature >= 0.0 {
                continue;
            }
            let t = -(du * c.inv_k2lambda[j] + dv * c.inv_lambda[j]) / (2.0 * curvature);
            if t > 0.0 && t < 1.0 {
                let mut a = vec![0.0; dim];
                a[i] = power * t;
                a[j] = power * (1.0 - t);
                let v = c.value(objective, &a);
                if v > best_value {
                    best = a;
                    best_value = v;
                }
            }
        }
    }
    let enumerated_value = best_value;

    let (refined, refined_value) = refine(&c, objective, best.clone(), power, options.refine_iterations);
    if refined_value > best_value {
        best = refined;
        best_value = refined_value;
    }

    let method = if best_value > enumerated_value * (1.0 + 1e-12) {
        SearchMethod::GradientRefined
    } else if condition.concentration_valid && enumerated_value <= vertex_best {
        SearchMethod::ClosedForm
    } else {
        SearchMethod::VertexEdge
    };

    let audit_margin = audit_margin(decomp, power, objective, best_value, options)?;
    Ok(AllocationSearchResult {
        allocation: c.allocation(decomp.n(), &best)?,
        achieved_fi: best_value,
        method,
        audit_margin,
        audit_trials: options.audit_trials,
    })
}

fn check_power(power: f64) -> Result<()> {
    if power > 0.0 && power.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidAllocation(format!("power must be positive, got {power}")))
    }
}

fn audit_margin(
    decomp: &SpectralDecomposition,
    power: f64,
    objective: Objective,
    achieved: f64,
    options: &SearchOptions,
) -> Result<f64> {
    if options.audit_trials == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    let audit = audit_random_allocations(decomp, power, objective, options.audit_trials, options.seed)?;
    Ok(audit.max_value - achieved)
}

/// Projected gradient ascent on the simplex with step backtracking.
fn refine(c: &Coefficients, objective: Objective, start: Vec<f64>, power: f64, iterations: usize) -> (Vec<f64>, f64) {
    let mut a = start;
    let mut value = c.value(objective, &a);
    let mut step = 0.1 * power / value.abs().max(1e-300);
    for _ in 0..iterations {
        let u: f64 = a.iter().zip(&c.inv_lambda).map(|(x, y)| x * y).sum();
        let v: f64 = a.iter().zip(&c.inv_k2lambda).map(|(x, y)| x * y).sum();
        let grad: Vec<f64> = match objective {
            Objective::Fi1d => c.inv_lambda.clone(),
            Objective::Fi2dX => c
                .inv_lambda
                .iter()
                .zip(&c.inv_k2lambda)
                .map(|(cu, cv)| v * cu + u * cv)
                .collect(),
        };
        let candidate: Vec<f64> = a.iter().zip(&grad).map(|(x, g)| x + step * g).collect();
        let candidate = project_simplex(&candidate, power);
        let cv = c.value(objective, &candidate);
        if cv > value {
            a = candidate;
            value = cv;
            step *= 1.5;
        } else {
            step *= 0.5;
            if step < 1e-18 {
                break;
            }
        }
    }
    (a, value)
}

/// Euclidean projection onto `{a ≥ 0, Σ a = total}`.
pub fn project_simplex(x: &[f64], total: f64) -> Vec<f64> {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = 0.0;
    let mut shift = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let candidate = (cumsum - total) / (i + 1) as f64;
        if s - candidate > 0.0 {
            shift = candidate;
        }
    }
    x.iter().map(|&v| (v - shift).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::CorrelationKernel;

    fn decomp(k: CorrelationKernel) -> SpectralDecomposition {
        SpectralDecomposition::decompose(&k)
    }

    #[test]
    fn one_d_examples() {
        let d = decomp(CorrelationKernel::new(4, vec![1.0, 0.5, 0.25]).unwrap());
        let r = maximize_fisher_1d(&d, 1.0).unwrap();
        assert_eq!(r.allocation.entries()[0].k, 1);
        assert!((r.achieved_fi - 4.0 / 3.0).abs() < 1e-15);
        assert!(r.audit_margin <= 1e-12);
        assert_eq!(r.method, SearchMethod::ClosedForm);

        let white = decomp(CorrelationKernel::white(10, 2.0).unwrap());
        let r = maximize_fisher_1d(&white, 1.0).unwrap();
        assert_eq!(r.allocation.entries()[0].k, 1);
        assert!(r.audit_margin.abs() < 1e-12);

        let e = decomp(CorrelationKernel::exponential(8, 1.0, 0.5).unwrap());
        assert_eq!(maximize_fisher_1d(&e, 1.0).unwrap().allocation.entries()[0].k, 3);
    }

    #[test]
    fn condition_examples() {
        let e = decomp(CorrelationKernel::exponential(16, 1.0, 0.9).unwrap());
        let r = check_condition(&e).unwrap();
        assert!(!r.lambda_order_ok);
        assert_eq!((r.argmin_lambda, r.argmin_k2lambda), (6, 2));
        assert!(!r.concentration_valid);

        let white = decomp(CorrelationKernel::white(8, 1.0).unwrap());
        let r = check_condition(&white).unwrap();
        assert!(!r.lambda_order_ok && r.lambda_tie);
        assert_eq!((r.argmin_lambda, r.argmin_k2lambda), (1, 1));
        assert!(r.concentration_valid);

        let single = decomp(CorrelationKernel::new(4, vec![1.0, 0.45, 0.05]).unwrap());
        let r = check_condition(&single).unwrap();
        assert!(r.concentration_valid && r.lambda_order_ok && r.k2lambda_order_ok);
    }

    #[test]
    fn two_d_examples() {
        let d = decomp(CorrelationKernel::new(4, vec![1.0, 0.5, 0.25]).unwrap());
        let r = maximize_fisher_2d(&d, 1.0).unwrap();
        assert!((r.achieved_fi - 16.0 / 9.0).abs() < 1e-12);
        assert_eq!(r.method, SearchMethod::ClosedForm);

        let white = decomp(CorrelationKernel::white(8, 0.5).unwrap());
        let r = maximize_fisher_2d(&white, 1.0).unwrap();
        assert_eq!(r.allocation.weights(), vec![(1, 1.0)]);
        assert!((r.achieved_fi - 4.0).abs() < 1e-12);
    }

    #[test]
    fn two_d_split_when_orderings_disagree() {
        // λ: k=1 → 1.0, k=2 → 0.3. argmin λ = 2, argmin k²λ = 1 (1.0 < 1.2).
        // Vertex values 1.0 and 1/(4·0.09) = 2.78; the edge does better.
        let d = decomp(CorrelationKernel::from_spectrum(5, &[2.0, 1.0, 0.3]).unwrap());
        let cond = check_condition(&d).unwrap();
        assert!(!cond.concentration_valid);
        let r = maximize_fisher_2d(&d, 1.0).unwrap();
        let vertices = [1.0f64, 1.0 / (4.0 * 0.09)];
        assert!(r.achieved_fi >= vertices[0].max(vertices[1]) - 1e-12);
        let audit = audit_random_allocations(&d, 1.0, Objective::Fi2dX, 100_000, 3).unwrap();
        assert!(audit.max_value <= r.achieved_fi + 1e-9);
        assert!(r.audit_margin <= 1e-9);
    }

    #[test]
    fn interior_edge_optimum() {
        let d = decomp(CorrelationKernel::from_spectrum(5, &[2.0, 1.0, 0.5]).unwrap());
        let r = maximize_fisher_2d(&d, 1.0).unwrap();
        assert!((r.achieved_fi - 1.125).abs() < 1e-12);
        assert_eq!(r.method, SearchMethod::VertexEdge);
        for (_, w) in r.allocation.weights() {
            assert!((w - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn audit_is_deterministic_and_bounded() {
        let d = decomp(CorrelationKernel::new(4, vec![1.0, 0.5, 0.25]).unwrap());
        let a = audit_random_allocations(&d, 1.0, Objective::Fi1d, 10_000, 9).unwrap();
        assert!(a.max_value <= 4.0 / 3.0 + 1e-12);
        let b = audit_random_allocations(&d, 1.0, Objective::Fi1d, 10_000, 9).unwrap();
        assert_eq!(a, b);

        let white = decomp(CorrelationKernel::white(12, 0.5).unwrap());
        let w = audit_random_allocations(&white, 1.0, Objective::Fi1d, 1000, 1).unwrap();
        assert!((w.max_value - 2.0).abs() < 1e-12 && (w.min_value - 2.0).abs() < 1e-12);
        assert!(audit_random_allocations(&white, 1.0, Objective::Fi1d, 0, 1).is_err());
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 2.0, -1.0], 1.0);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(p, vec![0.0, 1.0, 0.0]);
        let p = project_simplex(&[0.3, 0.3, 0.4], 1.0);
        assert!((p[0] - 0.3).abs() < 1e-15 && (p[2] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn power_scaling() {
        let d = decomp(CorrelationKernel::from_spectrum(9, &[3.0, 1.0, 0.5, 0.45, 0.44]).unwrap());
        let r1 = maximize_fisher_2d(&d, 1.0).unwrap();
        let r3 = maximize_fisher_2d(&d, 3.0).unwrap();
        assert!((r3.achieved_fi - 9.0 * r1.achieved_fi).abs() < 1e-9 * r3.achieved_fi);
        let w1: Vec<f64> = r1.allocation.weights().iter().map(|w| w.1).collect();
        let w3: Vec<f64> = r3.allocation.weights().iter().map(|w| w.1 / 3.0).collect();
        for (a, b) in w1.iter().zip(&w3) {
            assert!((a - b).abs() < 1e-6);
        }
        let s1 = maximize_fisher_1d(&d, 1.0).unwrap();
        let s3 = maximize_fisher_1d(&d, 3.0).unwrap();
        assert!((s3.achieved_fi - 3.0 * s1.achieved_fi).abs() < 1e-12);
    }

    #[test]
    fn singular_spectrum_is_rejected() {
        let d = decomp(CorrelationKernel::new(4, vec![1.0, 0.5, 0.0]).unwrap());
        assert!(matches!(maximize_fisher_1d(&d, 1.0), Err(Error::SingularCovariance { .. })));
        assert!(matches!(maximize_fisher_2d(&d, 1.0), Err(Error::SingularCovariance { .. })));
    }
}
