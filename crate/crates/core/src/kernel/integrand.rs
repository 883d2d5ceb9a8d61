use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::specfun::legendre_one_minus_cos;

use super::{degree, is_null_mode, KernelParams};
use crate::specfun::legendre::legendre_unchecked;

fn check_theta<T: Real>(theta: T, params: &KernelParams<T>) -> Result<()> {
    if theta > T::zero() && theta <= params.theta_max() {
        Ok(())
    } else {
        domain(format!("angle {theta} outside (0, pi/4]"))
    }
}

pub(crate) fn beta_unchecked<T: Real>(theta: T, log_power: T) -> T {
    let sin = theta.sin();
    (-sin.ln()).powf(log_power) / sin
}

/// `β(θ) = (sin θ)^{-1} (log(1/sin θ))^{2/s-1}`.
pub fn beta<T: Real>(theta: T, params: &KernelParams<T>) -> Result<T> {
    check_theta(theta, params)?;
    Ok(beta_unchecked(theta, params.log_power()))
}

/// The bracket `1 - sin^k P_l(sin) - cos^k P_l(cos)` (without the `δ_{n0}δ_{l0}`
/// term), for real `k`, arranged so nothing cancels as `θ → 0`:
/// `(1 - cos^k) + cos^k (1 - P_l(cos)) - sin^k P_l(sin)`.
pub(crate) fn bracket<T: Real>(k: T, l: usize, theta: T) -> T {
    let (sin, _) = theta.sin_cos();
    let half_log_cos2 = T::lit(0.5) * (-sin * sin).ln_1p();
    let one_minus_ck = -(k * half_log_cos2).exp_m1();
    let ck = (k * half_log_cos2).exp();
    let mut acc = one_minus_ck;
    if l > 0 {
        acc += ck * legendre_one_minus_cos(l, theta);
    }
    // |P_l| <= 1, so the sine term is dropped once it cannot reach the last bit
    let log_sk = k * sin.ln();
    if log_sk > acc.ln() + T::epsilon().ln() - T::lit(2.0) {
        let p = if l == 0 { T::one() } else { legendre_unchecked(l, sin) };
        acc -= log_sk.exp() * p;
    }
    acc
}

pub(crate) fn bracket_mode<T: Real>(n: usize, l: usize, theta: T) -> T {
    let raw = bracket(T::from_usize_lossy(degree(n, l)), l, theta);
    if n == 0 && l == 0 {
        raw + T::one()
    } else {
        raw
    }
}

/// `β(θ)` times the eigenvalue bracket. Identically zero on the null modes
/// `(0,0), (1,0), (0,1)`; never negative for the others.
pub fn eigen_integrand<T: Real>(n: usize, l: usize, theta: T, params: &KernelParams<T>) -> Result<T> {
    check_theta(theta, params)?;
    if is_null_mode(n, l) {
        return Ok(T::zero());
    }
    Ok(beta_unchecked(theta, params.log_power()) * bracket_mode(n, l, theta).max(T::zero()))
}
