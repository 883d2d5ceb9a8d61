//! Classical special functions behind the eigenbasis.
//!
//! Everything is evaluated by forward recurrences; the explicit and Rodrigues
//! formulas only appear in tests as oracles.
//!
//! Phase convention: associated Legendre functions carry **no** Condon–Shortley
//! factor, `P_l^m(x) = (1-x²)^{m/2} (d/dx)^m P_l(x)`, and
//! `Y_l^m = N_{l,m} P_l^{|m|}(cos θ) e^{imφ}` for every sign of `m`, so that
//! `Y_l^{-m} = conj(Y_l^m)`.
//!
//! Angles follow `σ = (cos θ, sin θ cos φ, sin θ sin φ)`: the polar axis is the
//! first coordinate axis.

pub mod gamma;
pub(crate) mod harmonics;
mod hermite;
pub(crate) mod laguerre;
pub(crate) mod legendre;

pub use harmonics::{spherical_harmonic, SphericalDirection};
pub use hermite::hermite_osc;
pub use laguerre::laguerre;
pub use legendre::{
    assoc_legendre, assoc_legendre_normalized, legendre, legendre_one_minus_cos, legendre_scaled_gap,
    legendre_upto, ASSOC_LEGENDRE_UNNORMALIZED_MAX_L,
};
