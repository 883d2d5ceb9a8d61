//! Dyadically graded Gauss quadrature for a single eigenvalue.
//!
//! Panel `j` is `[π/4·2^{-(j+1)}, π/4·2^{-j}]`, integrated adaptively. Away from
//! the singular corner the integrand behaves like `θ (log 1/θ)^{2/s-1}`, so the
//! panel contributions eventually shrink by about 4 per step and the remainder
//! is summed as a geometric tail.

use crate::error::{domain, Error, Result};
use crate::quadrature::{adaptive_panel, gauss_legendre, Rule};
use crate::scalar::{CompensatedSum, Real};

use super::integrand::{beta_unchecked, bracket, bracket_mode};
use super::table::EigenvalueEntry;
use super::{is_null_mode, KernelParams, QuadratureSpec};

const MAX_BISECTIONS: usize = 30;

pub(crate) struct Outcome<T> {
    pub value: T,
    pub err: T,
}

pub(crate) struct Failure<T> {
    pub partial: T,
    pub err: T,
    pub panels: usize,
    pub reason: String,
}

pub(crate) fn graded_integral<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    quad: &QuadratureSpec<T>,
    rule: &Rule<T>,
) -> std::result::Result<Outcome<T>, Failure<T>> {
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    let floor = T::min_positive_value() * T::lit(1e12);
    let mut sum = CompensatedSum::new();
    let mut err = T::zero();
    let mut leaves = 0usize;
    let mut recent = [T::zero(); 3];
    let mut b = T::FRAC_PI_4();
    let mut width_share = half;
    let mut j = 0usize;
    loop {
        let a = b * half;
        if a < floor {
            return Err(Failure {
                partial: sum.value(),
                err,
                panels: leaves,
                reason: "graded panels reached the floating-point floor".into(),
            });
        }
        let coarse = rule.integrate(a, b, &mut f);
        let tol = (quad.abs_tol * width_share).max(quad.rel_tol * coarse.abs().max(width_share * sum.value().abs()))
            * quarter;
        let res = adaptive_panel(rule, &mut f, a, b, Some(coarse), tol, MAX_BISECTIONS);
        leaves += res.leaves;
        sum.add(res.value);
        err += res.err;
        if !res.converged || leaves > quad.max_panels {
            return Err(Failure {
                partial: sum.value(),
                err,
                panels: leaves,
                reason: if res.converged {
                    format!("exceeded max_panels={}", quad.max_panels)
                } else {
                    format!("panel {j} unresolved after {MAX_BISECTIONS} bisections")
                },
            });
        }
        recent = [recent[1], recent[2], res.value.abs()];
        if j >= 2 {
            let budget = quad.abs_tol.max(quad.rel_tol * sum.value().abs()) * quarter;
            let [i2, i1, i0] = recent;
            if i0 <= budget * T::lit(1e-3) && i1 <= budget * T::lit(1e-3) {
                err += i0;
                return Ok(Outcome {
                    value: sum.value(),
                    err,
                });
            }
            if i1 > T::zero() && i2 > T::zero() {
                let r = i0 / i1;
                let r_prev = i1 / i2;
                if r < half && r_prev < half {
                    let tail = i0 * r / (T::one() - r);
                    if tail <= budget {
                        sum.add(tail);
                        err += tail;
                        return Ok(Outcome {
                            value: sum.value(),
                            err,
                        });
                    }
                }
            }
        }
        b = a;
        width_share *= half;
        j += 1;
    }
}

fn convergence_error<T: Real>(n: usize, l: usize, fail: Failure<T>) -> Error {
    Error::Convergence {
        n,
        l,
        partial: fail.partial.to_f64_lossy(),
        err_estimate: fail.err.to_f64_lossy(),
        panels: fail.panels,
        reason: fail.reason,
    }
}

fn integrate_mode<T: Real>(
    n: usize,
    l: usize,
    params: &KernelParams<T>,
    quad: &QuadratureSpec<T>,
) -> Result<EigenvalueEntry<T>> {
    quad.validate()?;
    let rule = gauss_legendre::<T>(quad.nodes_per_panel);
    let p = params.log_power();
    let out = graded_integral(|t| beta_unchecked(t, p) * bracket_mode(n, l, t).max(T::zero()), quad, &rule)
        .map_err(|f| convergence_error(n, l, f))?;
    Ok(EigenvalueEntry {
        n,
        l,
        lambda: out.value,
        err_estimate: out.err,
    })
}

/// `λ_{n,l}` with an error estimate. The null modes `n + l ≤ 1` return an
/// exact zero without touching the quadrature.
pub fn eigenvalue<T: Real>(
    n: usize,
    l: usize,
    params: &KernelParams<T>,
    quad: &QuadratureSpec<T>,
) -> Result<EigenvalueEntry<T>> {
    if is_null_mode(n, l) {
        return Ok(EigenvalueEntry {
            n,
            l,
            lambda: T::zero(),
            err_estimate: T::zero(),
        });
    }
    integrate_mode(n, l, params, quad)
}

/// Like [`eigenvalue`] but always runs the quadrature, null modes included,
/// and integrates the bracket as computed (no clamping at zero). Useful for
/// checking that the null modes really integrate to zero.
pub fn eigenvalue_forced<T: Real>(
    n: usize,
    l: usize,
    params: &KernelParams<T>,
    quad: &QuadratureSpec<T>,
) -> Result<EigenvalueEntry<T>> {
    quad.validate()?;
    let rule = gauss_legendre::<T>(quad.nodes_per_panel);
    let p = params.log_power();
    let out = graded_integral(|t| beta_unchecked(t, p) * bracket_mode(n, l, t), quad, &rule)
        .map_err(|f| convergence_error(n, l, f))?;
    Ok(EigenvalueEntry {
        n,
        l,
        lambda: out.value,
        err_estimate: out.err,
    })
}

/// The spectral gap `λ_{2,0}`, which sets every decay rate.
pub fn lambda_gap<T: Real>(params: &KernelParams<T>, quad: &QuadratureSpec<T>) -> Result<EigenvalueEntry<T>> {
    eigenvalue(2, 0, params, quad)
}

/// `λ_{n,0}` for real `n > 1`, returned as `(λ, err)`.
///
/// With `l = 0` the Legendre factors are identically one, so `k = 2n` may be
/// astronomically large (the tail probes go up to `n ≈ e^{690}`). For integer
/// `n` this agrees bit for bit with [`eigenvalue`]`(n, 0)`.
pub fn eigenvalue_radial<T: Real>(n: T, params: &KernelParams<T>, quad: &QuadratureSpec<T>) -> Result<(T, T)> {
    if !(n > T::one() && n.is_finite()) {
        return domain(format!("radial eigenvalue needs finite n > 1, got {n}"));
    }
    quad.validate()?;
    let rule = gauss_legendre::<T>(quad.nodes_per_panel);
    let p = params.log_power();
    let k = n + n;
    let out = graded_integral(|t| beta_unchecked(t, p) * bracket(k, 0, t).max(T::zero()), quad, &rule).map_err(
        |f| {
            let n_idx = n.to_f64_lossy().min(usize::MAX as f64) as usize;
            convergence_error(n_idx, 0, f)
        },
    )?;
    Ok((out.value, out.err))
}
