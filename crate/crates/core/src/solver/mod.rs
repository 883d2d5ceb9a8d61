//! Exact evolution in the eigenbasis and the checks built on it.
//!
//! Each amplitude evolves as `a_{n,l,m}(t) = e^{-λ_{n,l} t} a_{n,l,m}(0)`, so
//! there is no time stepping anywhere; the null modes never move.

mod checks;
mod report;
mod series;

pub use checks::{
    c0_decay, c0_literal, c0_rate1, cs_budget, decay_check_thm12, decay_check_thm12_with, rate1_check, rate1_check_with,
    rate1_modewise_worst, rate2_check,
    DecayCheck, ModewiseWorst, Rate1Check, Rate2Check,
};
pub use report::{evolution_report, DecaySlope, EvolutionReport, NormSample};
pub use series::{INIT_FORMS, 
    fit_gamma, series_tail_classify, InitialDataSpec, TailClassifier, TailEvidence, TailVerdict, Verdict,
    DEFAULT_SERIES_N, DEFAULT_WINDOW,
};

use crate::basis::{ModeIndex, SpectralField};
use crate::error::{domain, Result};
use crate::kernel::EigenvalueTable;
use crate::quadrature::gauss_legendre;
use crate::scalar::{CompensatedSum, Real};
use crate::spaces::modified_lambda;
use num_complex::Complex;

/// `g(t)`: every amplitude multiplied by `e^{-λ_{n,l} t}`.
pub fn evolve<T: Real>(field: &SpectralField<T>, t: T, table: &EigenvalueTable<T>) -> Result<SpectralField<T>> {
    if !(t >= T::zero() && t.is_finite()) {
        return domain(format!("evolution time must be finite and nonnegative, got {t}"));
    }
    let mut out = SpectralField::new(field.label());
    for (k, v) in field.iter() {
        let lambda = table.lambda(k.n, k.l)?;
        out.set(*k, *v * (-lambda * t).exp());
    }
    Ok(out)
}

/// Keeps the modes with `2n + l ≤ big_n`.
pub fn galerkin_truncate<T: Real>(field: &SpectralField<T>, big_n: usize) -> SpectralField<T> {
    field.filter(|k| k.degree() <= big_n)
}

/// `Σ e^{-2τλ̃} |⟨h, φ⟩|²`, which vanishes iff `h = 0`; applied to the
/// difference of two solutions it tests uniqueness.
pub fn uniqueness_functional<T: Real>(h: &SpectralField<T>, tau: T, table: &EigenvalueTable<T>) -> Result<T> {
    h.weighted_sum_sq(|k| Ok((-T::lit(2.0) * tau * modified_lambda(k.n, k.l, table)?).exp()))
}

/// Defect of the weak formulation
/// `⟨g(t),φ(t)⟩ - ⟨g_0,φ(0)⟩ = ∫_0^t ⟨g,∂_τφ⟩ dτ - ∫_0^t ⟨g,Lφ⟩ dτ`
/// for the test function `φ(τ) = (1+τ) Σ_j φ_{test_j}`.
///
/// The left side is evaluated in closed form, the time integrals by composite
/// Gauss–Legendre with `time_nodes` nodes per panel, with panels short enough
/// that `λ Δτ ≤ 2` for every mode involved.
pub fn weak_form_residual<T: Real>(
    g0: &SpectralField<T>,
    test_modes: &[ModeIndex],
    t: T,
    table: &EigenvalueTable<T>,
    time_nodes: usize,
) -> Result<T> {
    if !(t >= T::zero() && t.is_finite()) {
        return domain("weak form needs a finite t >= 0");
    }
    if time_nodes == 0 {
        return domain("weak form needs at least one time node");
    }
    // (amplitude, λ) for each test mode, with multiplicity
    let mut terms: Vec<(Complex<T>, T)> = Vec::new();
    for k in test_modes {
        let a = g0.get(k);
        if a.norm() > T::zero() {
            terms.push((a, table.lambda(k.n, k.l)?));
        }
    }
    let one = T::one();
    let mut lhs = Complex::new(T::zero(), T::zero());
    for &(a, lam) in &terms {
        lhs += a * ((one + t) * (-lam * t).exp() - one);
    }
    let lam_max = terms.iter().map(|x| x.1).fold(T::zero(), T::max);
    let panels = (lam_max * t * T::lit(0.5)).ceil().to_usize().unwrap_or(1).max(1);
    let rule = gauss_legendre::<T>(time_nodes);
    let h = t / T::from_usize_lossy(panels);
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for p in 0..panels {
        let lo = h * T::from_usize_lossy(p);
        let mid = lo + h * T::lit(0.5);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let tau = mid + h * T::lit(0.5) * *x;
            let wt = h * T::lit(0.5) * *w;
            for &(a, lam) in &terms {
                // ⟨g, ∂_τφ⟩ - ⟨g, Lφ⟩ for one mode
                let v = a * ((-lam * tau).exp() * (one - lam * (one + tau)) * wt);
                re.add(v.re);
                im.add(v.im);
            }
        }
    }
    Ok((lhs - Complex::new(re.value(), im.value())).norm())
}
