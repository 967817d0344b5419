//! Numerical tolerances shared by the library, the test suites and the CLI.

use serde::{Deserialize, Serialize};

/// One record holding every threshold the crate compares against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Maximum `|h - h†|` entry accepted as Hermitian.
    pub hermiticity: f64,
    /// Eigenpair residual `|H v - λ v|`, relative to `|H|`.
    pub eigen_residual: f64,
    /// Jacobi stops once the off-diagonal Frobenius norm falls below this times `|H|_F`.
    pub jacobi_convergence: f64,
    pub jacobi_max_sweeps: usize,
    /// Allowed deviation of `Σ|a|²` from one for a pure state.
    pub state_norm: f64,
    /// Allowed deviation of `tr ρ` from one.
    pub trace: f64,
    /// Most negative eigenvalue tolerated in a density operator.
    pub psd_floor: f64,
    /// Measures outside their range by less than this are clamped; more is an error.
    pub clamp: f64,
    /// Radicands within this of zero are treated as zero.
    pub radicand: f64,
    /// Residuals below `-violation` count as monogamy violations.
    pub violation: f64,
    /// Agreement required between analytic and numeric residuals.
    pub analytic_match: f64,
    /// Largest matrix dimension `kron` will build.
    pub max_dimension: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-10,
        eigen_residual: 1e-9,
        jacobi_convergence: 1e-12,
        jacobi_max_sweeps: 100,
        state_norm: 1e-12,
        trace: 1e-10,
        psd_floor: 1e-9,
        clamp: 1e-12,
        radicand: 1e-14,
        violation: 1e-9,
        analytic_match: 1e-9,
        max_dimension: 1024,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Square root with tiny negative radicands mapped to zero.
pub(crate) fn clamped_sqrt(x: f64) -> f64 {
    if x < 0.0 && x > -Tolerances::DEFAULT.radicand {
        0.0
    } else {
        x.sqrt()
    }
}
