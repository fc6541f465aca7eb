//! Numerical tolerances shared by every module.

/// Central tolerance record. [`Tolerances::DEFAULT`] is what the library
/// uses internally; tests and reports read the same values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Eigenvalues at or above `-psd_floor` count as nonnegative.
    pub psd_floor: f64,
    /// Eigenvalues must exceed this to be inverted.
    pub singular: f64,
    /// Relative slack for algebraic identities (θ-constancy, dense vs spectral).
    pub identity_rel: f64,
    /// Relative slack for finite-difference comparisons.
    pub finite_difference_rel: f64,
    /// Slack when comparing eigenvalue orderings; differences below it are ties.
    pub ordering: f64,
    /// Slack on Σ T² = P.
    pub power: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        psd_floor: 1e-12,
        singular: 1e-12,
        identity_rel: 1e-9,
        finite_difference_rel: 1e-6,
        ordering: 1e-12,
        power: 1e-10,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
