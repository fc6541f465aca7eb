//! Fisher information of ring and torus populations under circulant noise.
//!
//! For one noisy observation `r = f(θ) + n` with `n ~ N(0, C)` the Fisher
//! information is `I(θ) = ḟᵀ C⁻¹ ḟ`. In the eigenbasis this is `Σ T_k²/λ_k`,
//! which does not depend on θ. On the torus the x-information factorizes
//! into `(g_xᵀ D g_x)(f_yᵀ D f_y)` with `D = C⁻¹`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralDecomposition;
use crate::tolerance::Tolerances;
use crate::tuning::{PowerAllocation, TuningPopulation1D, TuningPopulation2D};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_n(pop_n: usize, decomp: &SpectralDecomposition) -> Result<()> {
    if pop_n != decomp.n() {
        return Err(Error::AxisMismatch(format!(
            "population has n={pop_n}, kernel has n={}",
            decomp.n()
        )));
    }
    Ok(())
}

/// `vᵀ C⁻¹ u`.
fn inverse_form(decomp: &SpectralDecomposition, v: &[f64], u: &[f64]) -> Result<f64> {
    Ok(dot(v, &decomp.apply_inverse(u)?))
}

/// `ḟ(θ)ᵀ C⁻¹ ḟ(θ)` as a quadratic form in neuron space.
pub fn fisher_1d(pop: &TuningPopulation1D, decomp: &SpectralDecomposition, theta: f64) -> Result<f64> {
    check_n(pop.n(), decomp)?;
    let fdot = pop.mean_derivative(theta);
    inverse_form(decomp, &fdot, &fdot)
}

/// `Σ T_k² / λ_k`.
pub fn fisher_1d_spectral(allocation: &PowerAllocation, decomp: &SpectralDecomposition) -> Result<f64> {
    let tolerance = Tolerances::DEFAULT.singular;
    allocation
        .entries()
        .iter()
        .map(|e| {
            let lambda = decomp.eigenvalue(e.k).ok_or(Error::UnpairedMode(e.k))?;
            if lambda <= tolerance {
                return Err(Error::SingularCovariance {
                    k: e.k,
                    lambda,
                    tolerance,
                });
            }
            Ok(e.amplitude * e.amplitude / lambda)
        })
        .sum()
}

/// `Σ T_k² / (k² λ_k)`, the information carried by the response itself.
pub fn response_information(allocation: &PowerAllocation, decomp: &SpectralDecomposition) -> Result<f64> {
    let tolerance = Tolerances::DEFAULT.singular;
    allocation
        .entries()
        .iter()
        .map(|e| {
            let lambda = decomp.eigenvalue(e.k).ok_or(Error::UnpairedMode(e.k))?;
            if lambda <= tolerance {
                return Err(Error::SingularCovariance {
                    k: e.k,
                    lambda,
                    tolerance,
                });
            }
            let k = e.k as f64;
            Ok(e.amplitude * e.amplitude / (k * k * lambda))
        })
        .sum()
}

/// `dI/dθ = 2 f̈ᵀ C⁻¹ ḟ`.
pub fn fisher_derivative(pop: &TuningPopulation1D, decomp: &SpectralDecomposition, theta: f64) -> Result<f64> {
    check_n(pop.n(), decomp)?;
    let fddot = pop.second_derivative(theta);
    let fdot = pop.mean_derivative(theta);
    Ok(2.0 * inverse_form(decomp, &fddot, &fdot)?)
}

/// Largest 1D information reachable with power `p`: `p / min λ` over paired
/// modes.
pub fn max_fisher_bound(decomp: &SpectralDecomposition, power: f64) -> Result<f64> {
    let lambda_min = decomp
        .paired_modes()
        .map(|m| m.eigenvalue)
        .fold(f64::INFINITY, f64::min);
    if !lambda_min.is_finite() {
        return Err(Error::NoPairedMode(decomp.n()));
    }
    if lambda_min <= Tolerances::DEFAULT.singular {
        return Err(Error::SingularCovariance {
            k: decomp
                .argmin_paired(|m| m.eigenvalue, 0.0)
                .map(|(k, _)| k)
                .unwrap_or(0),
            lambda: lambda_min,
            tolerance: Tolerances::DEFAULT.singular,
        });
    }
    Ok(power / lambda_min)
}

/// Cramér–Rao bound `1 / I`.
pub fn crb(fi: f64) -> Result<f64> {
    if fi > 0.0 && fi.is_finite() {
        Ok(1.0 / fi)
    } else {
        Err(Error::NonpositiveInformation(fi))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherReport1D {
    pub theta_samples: Vec<f64>,
    pub fi_values: Vec<f64>,
    pub fi_spectral: f64,
    pub fi_max_bound: f64,
    pub crb: f64,
}

impl FisherReport1D {
    /// `max |I(θ) − I_spectral| / I_spectral`.
    pub fn max_relative_variation(&self) -> f64 {
        self.fi_values
            .iter()
            .map(|v| (v - self.fi_spectral).abs() / self.fi_spectral)
            .fold(0.0, f64::max)
    }
}

/// Evaluates the quadratic form at every θ in `thetas` (in parallel, order
/// preserved) next to the spectral value, the power bound and the CRB.
pub fn fisher_report_1d(
    pop: &TuningPopulation1D,
    decomp: &SpectralDecomposition,
    thetas: &[f64],
) -> Result<FisherReport1D> {
    check_n(pop.n(), decomp)?;
    let fi_values = thetas
        .par_iter()
        .map(|&t| fisher_1d(pop, decomp, t))
        .collect::<Result<Vec<f64>>>()?;
    let fi_spectral = fisher_1d_spectral(pop.allocation(), decomp)?;
    Ok(FisherReport1D {
        theta_samples: thetas.to_vec(),
        fi_values,
        fi_spectral,
        fi_max_bound: max_fisher_bound(decomp, pop.allocation().power())?,
        crb: crb(fi_spectral)?,
    })
}

/// Information matrix entries of a torus population. `power` is per axis:
/// each axis allocation carries `Σ T² = P` on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherReport2D {
    pub theta_x: f64,
    pub theta_y: f64,
    pub i_x: f64,
    pub i_y: f64,
    pub i_xy: f64,
    /// `(Σ T²/λ)(Σ T²/(k²λ))` from the x-axis allocation.
    pub product_form: f64,
    /// `[I⁻¹]_xx`, the smallest attainable variance of θx.
    pub minimum_variance: f64,
}

pub fn fisher_2d(pop: &TuningPopulation2D, decomp: &SpectralDecomposition) -> Result<FisherReport2D> {
    fisher_2d_at(pop, decomp, 0.0, 0.0)
}

/// `I_x = (g_xᵀ D g_x)(f_yᵀ D f_y)`, `I_y = (f_xᵀ D f_x)(g_yᵀ D g_y)` and the
/// cross term `I_xy = (g_xᵀ D f_x)(f_yᵀ D g_y)`.
pub fn fisher_2d_at(
    pop: &TuningPopulation2D,
    decomp: &SpectralDecomposition,
    theta_x: f64,
    theta_y: f64,
) -> Result<FisherReport2D> {
    check_n(pop.n(), decomp)?;
    use crate::tuning::MeanResponse;
    let fx = pop.x().mean_response(theta_x);
    let gx = pop.x().mean_derivative(theta_x);
    let fy = pop.y().mean_response(theta_y);
    let gy = pop.y().mean_derivative(theta_y);

    let i_x = inverse_form(decomp, &gx, &gx)? * inverse_form(decomp, &fy, &fy)?;
    let i_y = inverse_form(decomp, &fx, &fx)? * inverse_form(decomp, &gy, &gy)?;
    let i_xy = inverse_form(decomp, &gx, &fx)? * inverse_form(decomp, &fy, &gy)?;
    let product_form =
        fisher_1d_spectral(pop.x().allocation(), decomp)? * response_information(pop.x().allocation(), decomp)?;
    let det = i_x * i_y - i_xy * i_xy;
    let minimum_variance = if det > 0.0 { i_y / det } else { f64::INFINITY };
    Ok(FisherReport2D {
        theta_x,
        theta_y,
        i_x,
        i_y,
        i_xy,
        product_form,
        minimum_variance,
    })
}
