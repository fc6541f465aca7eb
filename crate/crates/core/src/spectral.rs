//! Circulant symmetric correlation kernels on a ring and their eigenmodes.
//!
//! A kernel is stored as its distance profile `c_0..c_{n/2}`. The matrix
//! `C[i][j] = c[d(i, j)]` with ring distance `d` is never needed for the
//! numerics: its eigenvectors are the sampled cosines and sines
//!
//! ```text
//! w_k[i]  = sqrt(2/n) cos(2πki/n)      w'_k[i] = sqrt(2/n) sin(2πki/n)
//! ```
//!
//! for `1 <= k <= ceil(n/2) - 1`, plus the constant vector (k = 0) and, for
//! even `n`, the alternating vector (k = n/2). The eigenvalue of frequency
//! `k` is the cosine sum of the kernel profile.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Largest `n` that [`materialize_dense`] accepts by default.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

/// Largest axis size for the dense torus inversion check.
pub const MAX_TORUS_CHECK_N: usize = 16;

/// Tolerance of the dense torus inversion check.
pub const TORUS_CHECK_TOLERANCE: f64 = 1e-8;

/// Ring distance `min(|i-j|, n-|i-j|)`.
pub fn ring_distance(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j) % n;
    d.min(n - d)
}

/// Highest frequency that has a (cos, sin) eigenvector pair: `ceil(n/2) - 1`.
pub fn max_paired_frequency(n: usize) -> usize {
    n.div_ceil(2).saturating_sub(1)
}

pub fn is_paired(n: usize, k: usize) -> bool {
    k >= 1 && k <= max_paired_frequency(n)
}

// Angle 2πki/n with the product reduced modulo n first.
fn reduced_angle(k: usize, i: usize, n: usize) -> f64 {
    let r = ((k as u128 * i as u128) % n as u128) as f64;
    TAU * r / n as f64
}

/// Value of the cosine eigenvector of frequency `k` at neuron `i`.
/// Singleton modes (k = 0 and Nyquist) are normalized to `1/sqrt(n)`.
pub fn cos_basis(n: usize, k: usize, i: usize) -> f64 {
    if k == 0 {
        1.0 / (n as f64).sqrt()
    } else if 2 * k == n {
        let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign / (n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt() * reduced_angle(k, i, n).cos()
    }
}

/// Value of the sine eigenvector of frequency `k` at neuron `i`; zero for
/// singleton modes.
pub fn sin_basis(n: usize, k: usize, i: usize) -> f64 {
    if is_paired(n, k) {
        (2.0 / n as f64).sqrt() * reduced_angle(k, i, n).sin()
    } else {
        0.0
    }
}

/// Coefficients of one frequency in the eigenbasis: `cos` on `w_k`, `sin`
/// on `w'_k`. For singleton modes `sin` is always zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub k: usize,
    pub cos: f64,
    pub sin: f64,
}

impl ModeCoefficients {
    pub fn new(k: usize, cos: f64, sin: f64) -> Self {
        Self { k, cos, sin }
    }

    pub fn norm(&self) -> f64 {
        self.cos.hypot(self.sin)
    }
}

/// `cos_basis`/`sin_basis` for every residue `k·i mod n`, computed once.
struct BasisTable {
    n: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl BasisTable {
    fn new(n: usize) -> Self {
        let scale = (2.0 / n as f64).sqrt();
        let (sin, cos) = (0..n)
            .map(|r| {
                let (s, c) = (TAU * r as f64 / n as f64).sin_cos();
                (scale * s, scale * c)
            })
            .unzip();
        Self { n, cos, sin }
    }

    fn cos(&self, k: usize, i: usize) -> f64 {
        if k == 0 || 2 * k == self.n {
            cos_basis(self.n, k, i)
        } else {
            self.cos[(k * i) % self.n]
        }
    }

    fn sin(&self, k: usize, i: usize) -> f64 {
        if is_paired(self.n, k) {
            self.sin[(k * i) % self.n]
        } else {
            0.0
        }
    }
}

/// Coordinates of `v` in the eigenbasis, one entry per frequency `0..=n/2`.
pub fn project(v: &[f64]) -> Vec<ModeCoefficients> {
    let n = v.len();
    let table = BasisTable::new(n);
    (0..=n / 2)
        .map(|k| {
            let mut a = 0.0;
            let mut b = 0.0;
            for (i, &x) in v.iter().enumerate() {
                a += x * table.cos(k, i);
                b += x * table.sin(k, i);
            }
            ModeCoefficients::new(k, a, b)
        })
        .collect()
}

/// Inverse of [`project`]: `Σ cos·w_k + sin·w'_k`. Frequencies may appear in
/// any order and any subset.
pub fn synthesize(n: usize, coeffs: &[ModeCoefficients]) -> Vec<f64> {
    let table = BasisTable::new(n);
    let mut out = vec![0.0; n];
    for c in coeffs {
        let paired = is_paired(n, c.k);
        for (i, o) in out.iter_mut().enumerate() {
            *o += c.cos * table.cos(c.k, i);
            if paired {
                *o += c.sin * table.sin(c.k, i);
            }
        }
    }
    out
}

/// Distance-indexed covariance profile of a circulant symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationKernel {
    n: usize,
    values: Vec<f64>,
}

impl CorrelationKernel {
    /// `values` holds `c_0..c_{floor(n/2)}`. Positive semidefiniteness is not
    /// checked here; see [`SpectralDecomposition::validate_psd`].
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n < 4 {
            return Err(Error::MalformedKernel(format!("n must be at least 4, got {n}")));
        }
        if values.len() != n / 2 + 1 {
            return Err(Error::MalformedKernel(format!(
                "n={n} needs {} values c_0..c_{}, got {}",
                n / 2 + 1,
                n / 2,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::MalformedKernel(format!("c_{bad} is not finite")));
        }
        if values[0] <= 0.0 {
            return Err(Error::MalformedKernel(format!(
                "c_0 must be positive, got {}",
                values[0]
            )));
        }
        Ok(Self { n, values })
    }

    /// Independent noise with the given variance.
    pub fn white(n: usize, variance: f64) -> Result<Self> {
        let mut values = vec![0.0; n / 2 + 1];
        values[0] = variance;
        Self::new(n, values)
    }

    /// `c_d = c0 · rho^d` with `0 < rho < 1`.
    pub fn exponential(n: usize, c0: f64, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::MalformedKernel(format!(
                "exponential kernel needs 0 < rho < 1, got {rho}"
            )));
        }
        let values = (0..=n / 2).map(|d| c0 * rho.powi(d as i32)).collect();
        Self::new(n, values)?.checked_psd()
    }

    /// `c_d = c0 · exp(-d² / 2ℓ²)` with ring distance `d`.
    pub fn gaussian(n: usize, c0: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::MalformedKernel(format!(
                "gaussian kernel needs a positive length, got {length}"
            )));
        }
        let values = (0..=n / 2)
            .map(|d| c0 * (-((d * d) as f64) / (2.0 * length * length)).exp())
            .collect();
        Self::new(n, values)?.checked_psd()
    }

    /// Kernel whose eigenvalue at frequency `k` is `spectrum[k]`, for
    /// `k = 0..=n/2`. Inverse of the cosine sum.
    pub fn from_spectrum(n: usize, spectrum: &[f64]) -> Result<Self> {
        if spectrum.len() != n / 2 + 1 {
            return Err(Error::MalformedKernel(format!(
                "n={n} needs {} eigenvalues, got {}",
                n / 2 + 1,
                spectrum.len()
            )));
        }
        let values = (0..=n / 2)
            .map(|d| {
                let mut sum = spectrum[0];
                for (k, &lambda) in spectrum.iter().enumerate().skip(1) {
                    let weight = if is_paired(n, k) { 2.0 } else { 1.0 };
                    sum += weight * lambda * reduced_angle(k, d, n).cos();
                }
                sum / n as f64
            })
            .collect();
        Self::new(n, values)
    }

    fn checked_psd(self) -> Result<Self> {
        let report = SpectralDecomposition::decompose(&self).validate_psd();
        if report.valid {
            Ok(self)
        } else {
            Err(Error::NotPsd {
                k: report.argmin_frequency,
                lambda: report.min_eigenvalue,
            })
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Matrix entry `C[i][j]`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.values[ring_distance(i, j, self.n)]
    }

    /// Closed-form eigenvalue of frequency `k`:
    /// `c_0 + 2 Σ_{d=1}^{ceil(n/2)-1} c_d cos(2πkd/n) (+ c_{n/2} cos(πk), n even)`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let n = self.n;
        let mut sum = self.values[0];
        for d in 1..=max_paired_frequency(n) {
            sum += 2.0 * self.values[d] * reduced_angle(k, d, n).cos();
        }
        if n.is_multiple_of(2) {
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            sum += sign * self.values[n / 2];
        }
        sum
    }
}

/// One frequency of the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenMode {
    pub frequency: usize,
    pub eigenvalue: f64,
    /// True iff the mode has both a cosine and a sine eigenvector.
    pub paired: bool,
}

impl EigenMode {
    pub fn multiplicity(&self) -> usize {
        if self.paired {
            2
        } else {
            1
        }
    }
}

/// Result of a positive-semidefiniteness check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub argmin_frequency: usize,
    /// All eigenvalues `>= -psd_floor`.
    pub valid: bool,
    /// All eigenvalues `> singular` (invertible).
    pub strictly_positive: bool,
    /// Frequencies whose eigenvalue is below `-psd_floor`.
    pub negative_modes: Vec<usize>,
}

/// Analytic eigenmodes of a [`CorrelationKernel`], sorted by frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    kernel: CorrelationKernel,
    modes: Vec<EigenMode>,
}

impl SpectralDecomposition {
    pub fn decompose(kernel: &CorrelationKernel) -> Self {
        let n = kernel.n();
        let modes = (0..=n / 2)
            .map(|k| EigenMode {
                frequency: k,
                eigenvalue: kernel.eigenvalue(k),
                paired: is_paired(n, k),
            })
            .collect();
        Self {
            kernel: kernel.clone(),
            modes,
        }
    }

    pub fn n(&self) -> usize {
        self.kernel.n()
    }

    pub fn kernel(&self) -> &CorrelationKernel {
        &self.kernel
    }

    pub fn modes(&self) -> &[EigenMode] {
        &self.modes
    }

    pub fn mode(&self, k: usize) -> Option<&EigenMode> {
        self.modes.get(k)
    }

    pub fn eigenvalue(&self, k: usize) -> Option<f64> {
        self.mode(k).map(|m| m.eigenvalue)
    }

    pub fn paired_modes(&self) -> impl Iterator<Item = &EigenMode> {
        self.modes.iter().filter(|m| m.paired)
    }

    /// Frequency minimizing `key` over paired modes, ties broken toward the
    /// smaller frequency. The flag is true when another paired mode is
    /// within `tie_tolerance` of the minimum.
    pub fn argmin_paired<F>(&self, key: F, tie_tolerance: f64) -> Option<(usize, bool)>
    where
        F: Fn(&EigenMode) -> f64,
    {
        let mut best: Option<(usize, f64)> = None;
        for m in self.paired_modes() {
            let v = key(m);
            match best {
                Some((_, b)) if v >= b - tie_tolerance => {}
                _ => best = Some((m.frequency, v)),
            }
        }
        let (k, v) = best?;
        let tie = self
            .paired_modes()
            .any(|m| m.frequency != k && (key(m) - v).abs() <= tie_tolerance);
        Some((k, tie))
    }

    pub fn validate_psd(&self) -> PsdReport {
        self.validate_psd_with(&Tolerances::DEFAULT)
    }

    pub fn validate_psd_with(&self, tol: &Tolerances) -> PsdReport {
        let (argmin, min) = self
            .modes
            .iter()
            .map(|m| (m.frequency, m.eigenvalue))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        let negative_modes: Vec<usize> = self
            .modes
            .iter()
            .filter(|m| m.eigenvalue < -tol.psd_floor)
            .map(|m| m.frequency)
            .collect();
        PsdReport {
            min_eigenvalue: min,
            argmin_frequency: argmin,
            valid: negative_modes.is_empty(),
            strictly_positive: min > tol.singular,
            negative_modes,
        }
    }

    /// Fails with `SingularCovariance` on the first eigenvalue not above the
    /// singular tolerance.
    pub fn require_invertible(&self) -> Result<()> {
        let tolerance = Tolerances::DEFAULT.singular;
        match self.modes.iter().find(|m| m.eigenvalue <= tolerance) {
            Some(m) => Err(Error::SingularCovariance {
                k: m.frequency,
                lambda: m.eigenvalue,
                tolerance,
            }),
            None => Ok(()),
        }
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `C⁻¹ v` computed in the eigenbasis.
    pub fn apply_inverse(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        self.require_invertible()?;
        Ok(self.scale_spectrum(v, |lambda| 1.0 / lambda))
    }

    /// `C v` computed in the eigenbasis.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        Ok(self.scale_spectrum(v, |lambda| lambda))
    }

    fn scale_spectrum(&self, v: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
        let coeffs: Vec<ModeCoefficients> = project(v)
            .into_iter()
            .map(|c| {
                let s = f(self.modes[c.k].eigenvalue);
                ModeCoefficients::new(c.k, c.cos * s, c.sin * s)
            })
            .collect();
        synthesize(self.n(), &coeffs)
    }

    pub fn cosine_vector(&self, k: usize) -> Vec<f64> {
        (0..self.n()).map(|i| cos_basis(self.n(), k, i)).collect()
    }

    /// Sine eigenvector of frequency `k`, or `None` for singleton modes.
    pub fn sine_vector(&self, k: usize) -> Option<Vec<f64>> {
        is_paired(self.n(), k).then(|| (0..self.n()).map(|i| sin_basis(self.n(), k, i)).collect())
    }

    /// All `n` eigenvectors with their eigenvalues, cosine before sine.
    pub fn eigenvectors(&self) -> Vec<(f64, Vec<f64>)> {
        let mut out = Vec::with_capacity(self.n());
        for m in &self.modes {
            out.push((m.eigenvalue, self.cosine_vector(m.frequency)));
            if let Some(s) = self.sine_vector(m.frequency) {
                out.push((m.eigenvalue, s));
            }
        }
        out
    }

    /// Dense `C⁻¹` assembled from the eigenmodes.
    pub fn inverse_matrix(&self) -> Result<DMatrix<f64>> {
        self.require_invertible()?;
        let n = self.n();
        let mut d = DMatrix::zeros(n, n);
        for (lambda, v) in self.eigenvectors() {
            for i in 0..n {
                for j in 0..n {
                    d[(i, j)] += v[i] * v[j] / lambda;
                }
            }
        }
        Ok(d)
    }
}

/// Dense `n × n` matrix of a kernel. Meant for oracles on small rings.
pub fn materialize_dense(kernel: &CorrelationKernel) -> Result<DMatrix<f64>> {
    materialize_dense_with_limit(kernel, DEFAULT_DENSE_LIMIT)
}

pub fn materialize_dense_with_limit(kernel: &CorrelationKernel, limit: usize) -> Result<DMatrix<f64>> {
    let n = kernel.n();
    if n > limit {
        return Err(Error::SizeLimit { n, limit });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| kernel.entry(i, j)))
}

/// Rotates each paired frequency's coefficients by `kθ`:
/// `(a, b) ↦ (a cos kθ − b sin kθ, b cos kθ + a sin kθ)`.
///
/// On the ring this shifts the pattern forward by θ, so θ = 2πm/n moves
/// neuron `i`'s value to neuron `i + m`.
pub fn rotate_pattern(
    decomp: &SpectralDecomposition,
    coeffs: &[ModeCoefficients],
    theta: f64,
) -> Result<Vec<ModeCoefficients>> {
    coeffs
        .iter()
        .map(|c| {
            if !is_paired(decomp.n(), c.k) {
                return Err(Error::UnpairedMode(c.k));
            }
            let (s, co) = (c.k as f64 * theta).sin_cos();
            Ok(ModeCoefficients::new(
                c.k,
                c.cos * co - c.sin * s,
                c.sin * co + c.cos * s,
            ))
        })
        .collect()
}

/// Shift by `m` whole neurons in coefficient space. Unlike
/// [`rotate_pattern`] this also covers the singleton modes: the constant
/// mode is unchanged and the alternating mode flips sign for odd `m`.
pub fn shift_by_steps(n: usize, coeffs: &[ModeCoefficients], m: i64) -> Vec<ModeCoefficients> {
    let steps = m.rem_euclid(n as i64) as usize;
    coeffs
        .iter()
        .map(|c| {
            if is_paired(n, c.k) {
                let (s, co) = reduced_angle(c.k, steps, n).sin_cos();
                ModeCoefficients::new(c.k, c.cos * co - c.sin * s, c.sin * co + c.cos * s)
            } else if c.k != 0 && steps % 2 == 1 {
                ModeCoefficients::new(c.k, -c.cos, 0.0)
            } else {
                *c
            }
        })
        .collect()
}

/// Separable torus covariance `C'[(i,j),(k,l)] = C[i][k] · C[j][l]`, with
/// neuron `(i, j)` at flat index `i·n + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusCorrelation {
    axis: SpectralDecomposition,
}

impl TorusCorrelation {
    pub fn new(axis: SpectralDecomposition) -> Self {
        Self { axis }
    }

    pub fn axis(&self) -> &SpectralDecomposition {
        &self.axis
    }

    pub fn n(&self) -> usize {
        self.axis.n()
    }

    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let c = self.axis.kernel();
        c.entry(i, k) * c.entry(j, l)
    }

    /// Applies a per-axis linear map to both indices of an `n²` vector.
    fn apply_separable<F>(&self, v: &[f64], axis_op: F) -> Result<Vec<f64>>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>>,
    {
        let n = self.n();
        if v.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: v.len(),
            });
        }
        let mut rows = vec![0.0; n * n];
        for i in 0..n {
            let r = axis_op(&v[i * n..(i + 1) * n])?;
            rows[i * n..(i + 1) * n].copy_from_slice(&r);
        }
        let mut out = vec![0.0; n * n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                col[i] = rows[i * n + j];
            }
            let r = axis_op(&col)?;
            for i in 0..n {
                out[i * n + j] = r[i];
            }
        }
        Ok(out)
    }

    /// `D' v` with `D'[(i,j),(k,l)] = D[i][k] · D[j][l]`.
    pub fn apply_inverse(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.axis.require_invertible()?;
        self.apply_separable(v, |x| self.axis.apply_inverse(x))
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.apply_separable(v, |x| self.axis.apply(x))
    }

    /// Dense `n² × n²` matrix.
    pub fn materialize_dense(&self) -> Result<DMatrix<f64>> {
        let n = self.n();
        let size = n * n;
        if size > DEFAULT_DENSE_LIMIT {
            return Err(Error::SizeLimit {
                n: size,
                limit: DEFAULT_DENSE_LIMIT,
            });
        }
        let axis = materialize_dense(self.axis.kernel())?;
        Ok(axis.kronecker(&axis))
    }
}

/// Outcome of [`torus_inverse_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusInverseReport {
    pub n: usize,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Inverts the dense `n² × n²` torus covariance by LU and compares it
/// entrywise with `D[i][k] · D[j][l]`, where `D` is the axis inverse built
/// from the eigenmodes.
pub fn torus_inverse_check(decomp: &SpectralDecomposition) -> Result<TorusInverseReport> {
    let n = decomp.n();
    if n > MAX_TORUS_CHECK_N {
        return Err(Error::SizeLimit {
            n,
            limit: MAX_TORUS_CHECK_N,
        });
    }
    let axis_inverse = decomp.inverse_matrix()?;
    let torus = TorusCorrelation::new(decomp.clone());
    let dense = torus.materialize_dense()?;
    let dense_inverse = dense.lu().try_inverse().ok_or(Error::SingularCovariance {
        k: 0,
        lambda: 0.0,
        tolerance: Tolerances::DEFAULT.singular,
    })?;
    let mut max_abs_error: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let product = axis_inverse[(i, k)] * axis_inverse[(j, l)];
                    let err = (dense_inverse[(i * n + j, k * n + l)] - product).abs();
                    max_abs_error = max_abs_error.max(err);
                }
            }
        }
    }
    Ok(TorusInverseReport {
        n,
        max_abs_error,
        tolerance: TORUS_CHECK_TOLERANCE,
        holds: max_abs_error <= TORUS_CHECK_TOLERANCE,
    })
}
