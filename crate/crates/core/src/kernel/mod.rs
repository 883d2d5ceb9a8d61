//! The canonical Debye–Yukawa angular kernel and the eigenvalues of the
//! linearized operator.
//!
//! The kernel is only specified up to two-sided constants in the literature;
//! this crate fixes the representative
//!
//! ```text
//! β(θ) = (sin θ)^{-1} (log(1/sin θ))^{2/s-1},   0 < θ ≤ π/4,
//! ```
//!
//! and every numeric constant it reports (the gap `λ_{2,0}`, the ratio bounds,
//! the decay certificates) is relative to that choice.
//!
//! Eigenvalues are
//!
//! ```text
//! λ_{n,l} = ∫_0^{π/4} β(θ) [1 + δ_{n0}δ_{l0} - sin^k θ P_l(sin θ) - cos^k θ P_l(cos θ)] dθ,  k = 2n + l.
//! ```

mod cache;
mod engine;
mod integrand;
mod table;

pub use cache::{cache_path, load_cache, save_cache, table_to_csv, CacheHeader, CacheRow};
pub use engine::{eigenvalue, eigenvalue_forced, eigenvalue_radial, lambda_gap};
pub use integrand::{beta, eigen_integrand};
pub use table::{
    asymptotic_leading, asymptotic_leading_radial, eigenvalue_table, eigenvalue_table_serial, gap_violations,
    log_bound, ratio_bounds, EigenvalueEntry, EigenvalueTable, RatioBounds,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Tag mixed into every table version hash; bump when eigenvalue numerics change.
pub const CODE_VERSION: &str = "yukawa-eigen-1";

/// Debye–Yukawa exponent `s > 0`. The integration cutoff is always `π/4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams<T> {
    s: T,
}

impl<T: Real> KernelParams<T> {
    pub fn new(s: T) -> Result<Self> {
        if s > T::zero() && s.is_finite() {
            Ok(Self { s })
        } else {
            domain(format!("Debye-Yukawa exponent s must be positive and finite, got {s}"))
        }
    }

    pub fn s(&self) -> T {
        self.s
    }

    pub fn theta_max(&self) -> T {
        T::FRAC_PI_4()
    }

    /// `2/s - 1`, the power of the logarithm in `β`.
    pub fn log_power(&self) -> T {
        T::lit(2.0) / self.s - T::one()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Budget of Gauss leaves across all panels of one eigenvalue.
    pub max_panels: usize,
    pub nodes_per_panel: usize,
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(rel_tol: T, abs_tol: T, max_panels: usize, nodes_per_panel: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_panels,
            nodes_per_panel,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > T::zero() && self.abs_tol > T::zero()) {
            return domain("quadrature tolerances must be positive");
        }
        if self.nodes_per_panel < 8 {
            return domain("nodes_per_panel must be at least 8");
        }
        if self.max_panels == 0 {
            return domain("max_panels must be positive");
        }
        Ok(())
    }
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-14),
            max_panels: 100_000,
            nodes_per_panel: 20,
        }
    }
}

/// `k = 2n + l`, the total degree that appears as the power of `sin` and `cos`.
pub(crate) fn degree(n: usize, l: usize) -> usize {
    2 * n + l
}

pub(crate) fn is_null_mode(n: usize, l: usize) -> bool {
    n + l <= 1
}
