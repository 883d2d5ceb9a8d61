//! The eigenbasis `φ_{n,l,m}` and fields expanded in it.
//!
//! `φ_{n,l,m}(v) = c_{n,l} (|v|/√2)^l e^{-|v|²/4} L_n^{(l+1/2)}(|v|²/2) Y_l^m(v/|v|)`
//! with `c_{n,l} = (n! / (√2 Γ(n+l+3/2)))^{1/2}`. The family is orthonormal in
//! `L²(ℝ³)`, and `φ_{0,0,0} = √μ` with `μ` the standard Maxwellian.
//!
//! Fourier transforms use `ĝ(ξ) = ∫ e^{-iv·ξ} g(v) dv`, for which `μ̂(ξ) = e^{-|ξ|²/2}`.

mod eval;
mod field;

pub use eval::{
    eval_phi, fourier_sqrtmu_phi, gram_max_deviation, inner_product_numeric, minimal_resolution,
    oscillator_residual, sample_shell_points,
};
pub use field::{project_null, FieldRow, ModeIndex, NullPart, SpectralField};
