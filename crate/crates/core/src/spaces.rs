//! Weighted spectral norms.
//!
//! Every norm here is `‖u‖² = Σ w_{n,l} |u_{n,l,m}|²` for a mode weight built
//! from either the oscillator level `ω_{n,l} = 2n + l + 3/2 + e` or the modified
//! eigenvalue `λ̃_{n,l}` (`1` on the null modes, `λ_{n,l}` otherwise):
//!
//! | spec                 | weight                      |
//! |----------------------|-----------------------------|
//! | `l2`                 | 1                           |
//! | `shubin:k=K`         | `ω^K`                       |
//! | `logsob:tau=T,nu=V`  | `exp(2T (log ω)^{2/V})`     |
//! | `domain:tau=T`       | `exp(T λ̃)`                  |
//! | `domaindual:tau=T`   | `exp(-T λ̃)`                 |
//! | `domainplus:tau=T`   | `λ̃ exp(T λ̃)`                |
//! | `domainplusdual:tau=T` | `λ̃^{-1} exp(-T λ̃)`        |
//!
//! Only finite fields are normed here; infinite series are the solver's job.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::{ModeIndex, SpectralField};
use crate::error::{domain, Error, Result};
use crate::kernel::EigenvalueTable;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormSpec<T> {
    L2,
    Shubin { k: T },
    /// Negative `tau` gives the dual scale.
    LogSobolev { tau: T, nu: T },
    Domain { tau: T },
    DomainDual { tau: T },
    DomainPlus { tau: T },
    DomainPlusDual { tau: T },
}

pub const CANONICAL_FORMS: &str =
    "l2 | shubin:k=K | logsob:tau=T,nu=V | domain:tau=T | domaindual:tau=T | domainplus:tau=T | domainplusdual:tau=T";

impl<T: Real> NormSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            NormSpec::L2 => true,
            NormSpec::Shubin { k } => k >= T::zero() && k.is_finite(),
            NormSpec::LogSobolev { tau, nu } => tau.is_finite() && nu > T::zero() && nu.is_finite(),
            NormSpec::Domain { tau }
            | NormSpec::DomainDual { tau }
            | NormSpec::DomainPlus { tau }
            | NormSpec::DomainPlusDual { tau } => tau > T::zero() && tau.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            domain(format!("norm parameters out of range: {self}"))
        }
    }

    /// Whether the weight depends on eigenvalues.
    pub fn needs_table(&self) -> bool {
        matches!(
            self,
            NormSpec::Domain { .. }
                | NormSpec::DomainDual { .. }
                | NormSpec::DomainPlus { .. }
                | NormSpec::DomainPlusDual { .. }
        )
    }

    /// `log w` given the oscillator level `ω` and the modified eigenvalue `λ̃`.
    /// `lambda_tilde` is ignored by the oscillator-based families.
    pub fn log_weight(&self, omega: T, lambda_tilde: T) -> T {
        match *self {
            NormSpec::L2 => T::zero(),
            NormSpec::Shubin { k } => k * omega.ln(),
            NormSpec::LogSobolev { tau, nu } => T::lit(2.0) * tau * omega.ln().powf(T::lit(2.0) / nu),
            NormSpec::Domain { tau } => tau * lambda_tilde,
            NormSpec::DomainDual { tau } => -tau * lambda_tilde,
            NormSpec::DomainPlus { tau } => lambda_tilde.ln() + tau * lambda_tilde,
            NormSpec::DomainPlusDual { tau } => -lambda_tilde.ln() - tau * lambda_tilde,
        }
    }

    /// Squared-norm weight of one mode.
    pub fn weight(&self, n: usize, l: usize, table: Option<&EigenvalueTable<T>>) -> Result<T> {
        let lt = if self.needs_table() {
            let table = table.ok_or_else(|| Error::Domain(format!("norm {self} needs an eigenvalue table")))?;
            modified_lambda(n, l, table)?
        } else {
            T::one()
        };
        Ok(self.log_weight(oscillator_level(n, l), lt).exp())
    }
}

impl<T: Real> fmt::Display for NormSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |x: T| x.to_f64_lossy();
        match *self {
            NormSpec::L2 => write!(f, "l2"),
            NormSpec::Shubin { k } => write!(f, "shubin:k={}", v(k)),
            NormSpec::LogSobolev { tau, nu } => write!(f, "logsob:tau={},nu={}", v(tau), v(nu)),
            NormSpec::Domain { tau } => write!(f, "domain:tau={}", v(tau)),
            NormSpec::DomainDual { tau } => write!(f, "domaindual:tau={}", v(tau)),
            NormSpec::DomainPlus { tau } => write!(f, "domainplus:tau={}", v(tau)),
            NormSpec::DomainPlusDual { tau } => write!(f, "domainplusdual:tau={}", v(tau)),
        }
    }
}

impl<T: Real> FromStr for NormSpec<T> {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown norm `{text}`; expected one of: {CANONICAL_FORMS}"));
        let text_trim = text.trim();
        let (name, args) = text_trim.split_once(':').unwrap_or((text_trim, ""));
        let mut params: Vec<(&str, f64)> = Vec::new();
        for part in args.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            params.push((k.trim(), v));
        }
        let take = |params: &[(&str, f64)], keys: &[&str]| -> Result<Vec<T>> {
            if params.len() != keys.len() {
                return Err(bad());
            }
            keys.iter()
                .map(|key| params.iter().find(|(k, _)| k == key).map(|(_, v)| T::lit(*v)).ok_or_else(bad))
                .collect()
        };
        let spec = match name.to_ascii_lowercase().as_str() {
            "l2" => {
                take(&params, &[])?;
                NormSpec::L2
            }
            "shubin" => NormSpec::Shubin {
                k: take(&params, &["k"])?[0],
            },
            "logsob" => {
                let v = take(&params, &["tau", "nu"])?;
                NormSpec::LogSobolev { tau: v[0], nu: v[1] }
            }
            "domain" => NormSpec::Domain {
                tau: take(&params, &["tau"])?[0],
            },
            "domaindual" => NormSpec::DomainDual {
                tau: take(&params, &["tau"])?[0],
            },
            "domainplus" => NormSpec::DomainPlus {
                tau: take(&params, &["tau"])?[0],
            },
            "domainplusdual" => NormSpec::DomainPlusDual {
                tau: take(&params, &["tau"])?[0],
            },
            _ => return Err(bad()),
        };
        spec.validate().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(spec)
    }
}

/// `ω_{n,l} = 2n + l + 3/2 + e`.
pub fn oscillator_level<T: Real>(n: usize, l: usize) -> T {
    T::from_usize_lossy(2 * n + l) + T::lit(1.5) + T::E()
}

/// `λ̃_{n,l}`: `1` on the null modes, the tabulated eigenvalue elsewhere.
pub fn modified_lambda<T: Real>(n: usize, l: usize, table: &EigenvalueTable<T>) -> Result<T> {
    if n + l <= 1 {
        Ok(T::one())
    } else {
        table.lambda(n, l)
    }
}

/// `(Σ w |c|²)^{1/2}` for the chosen norm.
pub fn spectral_norm<T: Real>(
    field: &SpectralField<T>,
    spec: &NormSpec<T>,
    table: Option<&EigenvalueTable<T>>,
) -> Result<T> {
    spec.validate()?;
    Ok(field.weighted_sum_sq(|k: &ModeIndex| spec.weight(k.n, k.l, table))?.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungMin<T> {
    pub min_value: T,
    pub argmin: T,
    /// `log` of `min_value`, which stays finite when the value underflows.
    pub log_min: T,
    pub log_argmin: T,
}

/// Minimizes `h(x) = e^{2τ(log x)^{2/ν}} / x^k` over `[1, x_max]`.
///
/// In `u = log x` the exponent `2τu^{2/ν} - ku` is convex with stationary point
/// `u* = (kν/4τ)^{ν/(2-ν)}`; golden-section search runs on a bracket around it.
pub fn young_min<T: Real>(tau: T, nu: T, k: T, x_max: T) -> Result<YoungMin<T>> {
    check_young(tau, nu, k)?;
    if !(x_max >= T::one()) {
        return domain("young_min needs x_max >= 1");
    }
    let g = |u: T| T::lit(2.0) * tau * u.powf(T::lit(2.0) / nu) - k * u;
    if k == T::zero() {
        return Ok(YoungMin {
            min_value: T::one(),
            argmin: T::one(),
            log_min: T::zero(),
            log_argmin: T::zero(),
        });
    }
    let u_max = x_max.ln();
    let u_star = stationary_point(tau, nu, k);
    if u_star > u_max {
        return domain(format!(
            "minimizer log x = {u_star} lies beyond log x_max = {u_max}; enlarge the search domain"
        ));
    }
    let (mut a, mut b) = (u_star * T::lit(0.25), (u_star * T::lit(4.0)).min(u_max));
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() <= T::epsilon() * T::lit(4.0) * (T::one() + u_star) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let u = T::lit(0.5) * (a + b);
    let log_min = g(u);
    Ok(YoungMin {
        min_value: log_min.exp(),
        argmin: u.exp(),
        log_min,
        log_argmin: u,
    })
}

fn check_young<T: Real>(tau: T, nu: T, k: T) -> Result<()> {
    if !(tau > T::zero() && nu > T::zero() && nu < T::lit(2.0) && k >= T::zero()) {
        return domain(format!("Young bound needs tau > 0, 0 < nu < 2, k >= 0 (got {tau}, {nu}, {k})"));
    }
    Ok(())
}

fn stationary_point<T: Real>(tau: T, nu: T, k: T) -> T {
    (k * nu / (T::lit(4.0) * tau)).powf(nu / (T::lit(2.0) - nu))
}

/// `log` of [`young_rhs`].
pub fn young_log_rhs<T: Real>(tau: T, nu: T, k: T) -> Result<T> {
    check_young(tau, nu, k)?;
    let two = T::lit(2.0);
    Ok(-((two - nu) / two) * (nu / (T::lit(4.0) * tau)).powf(nu / (two - nu)) * k.powf(two / (two - nu)))
}

/// `exp(-((2-ν)/2) (ν/4τ)^{ν/(2-ν)} k^{2/(2-ν)})`, the value of `min h`.
pub fn young_rhs<T: Real>(tau: T, nu: T, k: T) -> Result<T> {
    Ok(young_log_rhs(tau, nu, k)?.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingEstimate<T> {
    pub tau1_hat: T,
    pub tau2_hat: T,
}

/// Extremes of `λ̃_{n,l} / (2 (log ω_{n,l})^{2/s})` over the table.
///
/// These are finite-truncation witnesses for the inclusions between the
/// domain spaces and the log-Sobolev scale; nothing is claimed beyond the table.
pub fn embedding_estimate<T: Real>(table: &EigenvalueTable<T>, s: T) -> Result<EmbeddingEstimate<T>> {
    if !table.covers(50, 50) {
        return domain("embedding estimate needs a table covering n, l <= 50");
    }
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for e in table.entries() {
        let lt = modified_lambda(e.n, e.l, table)?;
        let r = lt / (T::lit(2.0) * oscillator_level::<T>(e.n, e.l).ln().powf(T::lit(2.0) / s));
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(EmbeddingEstimate {
        tau1_hat: lo,
        tau2_hat: hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{eigenvalue_table, KernelParams, QuadratureSpec};
    use num_complex::Complex;
    use proptest::prelude::*;
    use std::f64::consts::E;
    use std::sync::OnceLock;

    fn table_s2() -> &'static EigenvalueTable<f64> {
        static T: OnceLock<EigenvalueTable<f64>> = OnceLock::new();
        T.get_or_init(|| eigenvalue_table(60, 60, &KernelParams::new(2.0).unwrap(), &QuadratureSpec::default()).unwrap())
    }

    fn single(n: usize, l: usize) -> SpectralField<f64> {
        SpectralField::from_real("one", &[(n, l, 0, 1.0)]).unwrap()
    }

    #[test]
    fn norm_examples() {
        let g = single(0, 0);
        let sh: NormSpec<f64> = "shubin:k=2".parse().unwrap();
        assert!((spectral_norm(&g, &sh, None).unwrap() - (1.5 + E)).abs() < 1e-14);
        let ls: NormSpec<f64> = "logsob:tau=1,nu=2".parse().unwrap();
        assert!((spectral_norm(&g, &ls, None).unwrap() - 4.218_281_828).abs() < 1e-9);
        let d: NormSpec<f64> = "domain:tau=1".parse().unwrap();
        let v = spectral_norm(&single(2, 0), &d, Some(table_s2())).unwrap();
        assert!((v - (0.430_964_406_3f64 / 2.0).exp()).abs() < 1e-9);
        assert!(matches!(spectral_norm(&single(2, 0), &d, None), Err(Error::Domain(_))));
        assert_eq!(spectral_norm(&g, &NormSpec::L2, None).unwrap(), 1.0);
    }

    #[test]
    fn modified_lambda_cases() {
        let t = table_s2();
        assert_eq!(modified_lambda(0, 0, t).unwrap(), 1.0);
        assert_eq!(modified_lambda(1, 0, t).unwrap(), 1.0);
        assert!((modified_lambda(2, 0, t).unwrap() - 0.430_964_406_3).abs() < 1e-9);
        assert!(modified_lambda(61, 0, t).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in [
            "l2",
            "shubin:k=2",
            "logsob:tau=-0.5,nu=1.5",
            "domain:tau=0.5",
            "domaindual:tau=0.5",
            "domainplus:tau=2",
            "domainplusdual:tau=0.25",
        ] {
            let spec: NormSpec<f64> = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        for s in ["sobolev:k=1", "shubin", "shubin:k=-1", "domain:tau=0", "logsob:tau=1", "l2:x=1"] {
            assert!(s.parse::<NormSpec<f64>>().is_err(), "{s}");
        }
    }

    #[test]
    fn young_examples() {
        let m = young_min(1.0, 1.0, 4.0, 1e6).unwrap();
        assert!((m.min_value - (-2f64).exp()).abs() < 1e-12);
        assert!((m.argmin - E).abs() < 1e-6);
        let edge = young_min(1.0, 1.0, 0.0, 10.0).unwrap();
        assert_eq!((edge.min_value, edge.argmin), (1.0, 1.0));
        let m = young_min(0.5, 1.5, 3.0, f64::MAX).unwrap();
        let r = young_rhs(0.5, 1.5, 3.0).unwrap();
        assert!((m.min_value / r - 1.0).abs() < 1e-6);
        assert!((young_rhs(1.0, 1.0, 4.0).unwrap() - (-2f64).exp()).abs() < 1e-15);
        assert!((young_rhs(1.0, 1.0, 1.0).unwrap() - (-0.125f64).exp()).abs() < 1e-15);
        assert!(young_min(1.0, 1.0, 4.0, 2.0).is_err());
        assert!(young_rhs(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn embedding_witnesses() {
        let est = embedding_estimate(table_s2(), 2.0).unwrap();
        assert!(est.tau1_hat > 0.0 && est.tau1_hat <= est.tau2_hat);
        let small = table_s2().restrict(10, 10);
        assert!(embedding_estimate(&small, 2.0).is_err());
    }

    fn arb_field() -> impl Strategy<Value = SpectralField<f64>> {
        prop::collection::vec((0usize..25, 0usize..25, -1.0f64..1.0, -1.0f64..1.0), 1..30).prop_map(|v| {
            SpectralField::from_modes(
                "random",
                v.into_iter().map(|(n, l, re, im)| (ModeIndex { n, l, m: 0 }, Complex::new(re, im))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn young_min_dominates_rhs(tau in 0.5f64..2.0, nu in 0.2f64..1.5, k in 1.0f64..4.0) {
            let m = young_min(tau, nu, k, f64::MAX).unwrap();
            let r = young_rhs(tau, nu, k).unwrap();
            prop_assert!(m.min_value >= r * (1.0 - 1e-9));
            prop_assert!((m.log_min - r.ln()).abs() <= 1e-9 * (1.0 + r.ln().abs()));
        }

        #[test]
        fn domain_norm_equals_exponential_series(f in arb_field(), tau in 0.05f64..2.0) {
            let t = table_s2();
            let closed = spectral_norm(&f, &NormSpec::Domain { tau }, Some(t)).unwrap().powi(2);
            // Σ_k τ^k/k! ‖(L+P)^{k/2} u‖²
            let mut series = 0.0;
            let mut coef = 1.0;
            for k in 0..400 {
                if k > 0 {
                    coef *= tau / k as f64;
                }
                let term = coef * f.weighted_sum_sq(|m| Ok(modified_lambda(m.n, m.l, t)?.powi(k))).unwrap();
                series += term;
                if term < 1e-17 * series {
                    break;
                }
            }
            prop_assert!((series - closed).abs() <= 1e-10 * closed);
        }

        #[test]
        fn log_sobolev_monotone(f in arb_field(), t1 in -1.0f64..1.0, dt in 0.0f64..1.0, nu1 in 0.3f64..3.0, dnu in 0.0f64..2.0) {
            let a = spectral_norm(&f, &NormSpec::LogSobolev { tau: t1, nu: 1.0 }, None).unwrap();
            let b = spectral_norm(&f, &NormSpec::LogSobolev { tau: t1 + dt, nu: 1.0 }, None).unwrap();
            prop_assert!(b >= a * (1.0 - 1e-14));
            let tau = t1.abs() + 0.01;
            let lo = spectral_norm(&f, &NormSpec::LogSobolev { tau, nu: nu1 + dnu }, None).unwrap();
            let hi = spectral_norm(&f, &NormSpec::LogSobolev { tau, nu: nu1 }, None).unwrap();
            prop_assert!(hi >= lo * (1.0 - 1e-14));
        }

        #[test]
        fn duality_pairing(f in arb_field(), g in arb_field(), tau in 0.05f64..2.0) {
            let t = table_s2();
            let pairing = f.inner(&g).norm();
            let bound = spectral_norm(&f, &NormSpec::DomainDual { tau }, Some(t)).unwrap()
                * spectral_norm(&g, &NormSpec::Domain { tau }, Some(t)).unwrap();
            prop_assert!(pairing <= bound * (1.0 + 1e-12));
        }

        #[test]
        fn shubin_below_log_sobolev(f in arb_field(), tau in 0.0f64..2.0, s in 0.3f64..2.0) {
            let sh = spectral_norm(&f, &NormSpec::Shubin { k: 2.0 * tau }, None).unwrap();
            let ls = spectral_norm(&f, &NormSpec::LogSobolev { tau, nu: s }, None).unwrap();
            prop_assert!(sh <= ls * (1.0 + 1e-12));
        }

        #[test]
        fn coefficient_young_inequality(f in arb_field(), tau in 0.5f64..2.0, nu in 0.2f64..1.5, k in 1.0f64..4.0) {
            let c = (2.0 - nu) / 4.0 * (nu / 4.0).powf(nu / (2.0 - nu));
            let lhs = spectral_norm(&f, &NormSpec::Shubin { k }, None).unwrap().powi(2);
            let rhs = (2.0 * c * (1.0 / tau).powf(nu / (2.0 - nu)) * k.powf(2.0 / (2.0 - nu))).exp()
                * spectral_norm(&f, &NormSpec::LogSobolev { tau, nu }, None).unwrap().powi(2);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}
