//! Infinite initial data given by closed-form `l = 0` coefficient series, and
//! a numerical verdict on whether the weighted series converges at time `t`.
//!
//! A term is `a_n = w(ω_n, λ̃_n) |c_n|² e^{-2λ_{n,0} t}`. The verdict combines
//! the trailing window of the tabulated range `n ≤ N` with probes of
//! `b(u) = e^u a(e^u)` on a log-spaced grid of `n = e^u` far beyond `N`: the
//! series behaves like `∫ b(u) du`, and the probe eigenvalues come from the
//! single-mode engine, which accepts real `n`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::basis::{ModeIndex, SpectralField};
use crate::error::{domain, Error, Result};
use crate::kernel::{eigenvalue_radial, EigenvalueTable, KernelParams, QuadratureSpec};
use crate::scalar::{CompensatedSum, Real};
use crate::spaces::{modified_lambda, NormSpec};

pub const DEFAULT_SERIES_N: usize = 10_000;
pub const DEFAULT_WINDOW: usize = 1_000;

const PROBES: usize = 64;
/// Trailing probes whose consecutive ratios decide the asymptotic trend.
const TREND_PROBES: usize = 8;
const BLOCKS: usize = 10;
const GROWTH_FACTOR: f64 = 10.0;
const TAIL_TOL: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialDataSpec<T> {
    FiniteModes(SpectralField<T>),
    /// `Σ_{n≥1} n^{-1} e^{τ₀ λ_{n,0}} φ_{n,0,0}`.
    DelaySeries { tau0: T, n_max: usize },
    /// `Σ_{n≥2} (n^{1/2} log n)^{-1} φ_{n,0,0}`.
    S2DelaySeries { n_max: usize },
    /// `Σ_{n≥2} (n^{(τ+1)/2} log n)^{-1} φ_{n,0,0}`.
    SobolevSeries { tau: T, n_max: usize },
}

impl<T: Real> InitialDataSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let n_ok = self.n_max().is_none_or(|n| n >= 2);
        let p_ok = match *self {
            InitialDataSpec::DelaySeries { tau0: p, .. } | InitialDataSpec::SobolevSeries { tau: p, .. } => {
                p > T::zero() && p.is_finite()
            }
            _ => true,
        };
        if n_ok && p_ok {
            Ok(())
        } else {
            domain(format!("invalid initial data: {self}"))
        }
    }

    pub fn n_max(&self) -> Option<usize> {
        match *self {
            InitialDataSpec::FiniteModes(_) => None,
            InitialDataSpec::DelaySeries { n_max, .. }
            | InitialDataSpec::S2DelaySeries { n_max }
            | InitialDataSpec::SobolevSeries { n_max, .. } => Some(n_max),
        }
    }

    fn first_index(&self) -> usize {
        match self {
            InitialDataSpec::DelaySeries { .. } => 1,
            _ => 2,
        }
    }

    /// `log |c_n|` for real `n` in the series range; `lambda` is `λ_{n,0}`.
    fn log_coeff(&self, n: T, lambda: T) -> T {
        let ln = n.ln();
        match *self {
            InitialDataSpec::FiniteModes(_) => T::neg_infinity(),
            InitialDataSpec::DelaySeries { tau0, .. } => tau0 * lambda - ln,
            InitialDataSpec::S2DelaySeries { .. } => -T::lit(0.5) * ln - ln.ln(),
            InitialDataSpec::SobolevSeries { tau, .. } => -(tau + T::one()) * T::lit(0.5) * ln - ln.ln(),
        }
    }

    /// The finite field: the series truncated at `n ≤ N`.
    pub fn materialize(&self, table: &EigenvalueTable<T>) -> Result<SpectralField<T>> {
        self.validate()?;
        let n_max = match self {
            InitialDataSpec::FiniteModes(f) => return Ok(f.clone()),
            _ => self.n_max().unwrap_or(0),
        };
        let mut out = SpectralField::new(self.to_string());
        for n in self.first_index()..=n_max {
            let c = self.log_coeff(T::from_usize_lossy(n), table.lambda(n, 0)?).exp();
            if !c.is_finite() {
                return domain(format!("coefficient of mode ({n},0,0) overflows"));
            }
            out.set(ModeIndex { n, l: 0, m: 0 }, Complex::new(c, T::zero()));
        }
        Ok(out)
    }
}

impl<T: Real> fmt::Display for InitialDataSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialDataSpec::FiniteModes(field) => write!(f, "modes[{}]", field.len()),
            InitialDataSpec::DelaySeries { tau0, n_max } => write!(f, "delay:tau0={},N={n_max}", tau0.to_f64_lossy()),
            InitialDataSpec::S2DelaySeries { n_max } => write!(f, "s2delay:N={n_max}"),
            InitialDataSpec::SobolevSeries { tau, n_max } => write!(f, "sobolev:tau={},N={n_max}", tau.to_f64_lossy()),
        }
    }
}

pub const INIT_FORMS: &str =
    "modes:N,L,M=AMP;... (AMP real or like 0.5+0.1i) | delay:tau0=T[,N=..] | s2delay[:N=..] | sobolev:tau=T[,N=..]";

fn parse_modes<T: Real>(body: &str) -> Result<SpectralField<T>> {
    let bad = |m: &str| Error::Parse(format!("bad mode entry `{m}`; expected N,L,M=AMP"));
    let mut field = SpectralField::new("modes");
    for item in body.split(';').map(str::trim).filter(|x| !x.is_empty()) {
        let (idx, amp) = item.split_once('=').ok_or_else(|| bad(item))?;
        let parts: Vec<&str> = idx.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad(item));
        }
        let n: usize = parts[0].parse().map_err(|_| bad(item))?;
        let l: usize = parts[1].parse().map_err(|_| bad(item))?;
        let m: i64 = parts[2].parse().map_err(|_| bad(item))?;
        let mode = ModeIndex::new(n, l, m).map_err(|e| Error::Parse(e.to_string()))?;
        let a: Complex<f64> = amp.trim().parse().map_err(|_| bad(item))?;
        let cur = field.get(&mode);
        field.set(mode, cur + Complex::new(T::lit(a.re), T::lit(a.im)));
    }
    if field.is_empty() {
        return Err(Error::Parse("inline modes list is empty".into()));
    }
    Ok(field)
}

impl<T: Real> FromStr for InitialDataSpec<T> {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, body) = text.split_once(':').unwrap_or((text, ""));
        if name == "modes" {
            return Ok(InitialDataSpec::FiniteModes(parse_modes(body)?));
        }
        let bad = || Error::Parse(format!("unknown initial data `{text}`; expected one of: {INIT_FORMS}"));
        let mut n_max = DEFAULT_SERIES_N;
        let mut tau = None;
        for kv in body.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            match k.trim() {
                "N" => n_max = v.trim().parse().map_err(|_| bad())?,
                "tau" | "tau0" => tau = Some(T::lit(v.trim().parse::<f64>().map_err(|_| bad())?)),
                _ => return Err(bad()),
            }
        }
        let spec = match (name, tau) {
            ("delay", Some(tau0)) => InitialDataSpec::DelaySeries { tau0, n_max },
            ("s2delay", None) => InitialDataSpec::S2DelaySeries { n_max },
            ("sobolev", Some(tau)) => InitialDataSpec::SobolevSeries { tau, n_max },
            _ => return Err(bad()),
        };
        spec.validate().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Convergent,
    Divergent,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Convergent => "convergent",
            Verdict::Divergent => "divergent",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TailEvidence {
    /// Block ends `n_j` of the trailing window and `log S_{n_j}` there.
    pub block_ends: Vec<usize>,
    pub log_partial_sums: Vec<f64>,
    /// Sum over block `j` divided by the sum over block `j-1`.
    pub block_ratios: Vec<f64>,
    /// `S_N / S_{N-W}`.
    pub window_growth: f64,
    /// Probe abscissae `u = log n` and `log b(u)`.
    pub probe_log_n: Vec<f64>,
    pub probe_log_b: Vec<f64>,
    /// `b(u_{i+1}) / b(u_i)` over the trailing probes.
    pub probe_ratios: Vec<f64>,
    /// `-d log b / d log u` at the last probe.
    pub kappa: Option<f64>,
    /// Bound on `Σ_{n>N} a_n` when the probes decay fast enough.
    pub tail_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailVerdict {
    pub classification: Verdict,
    pub reason: String,
    pub evidence: TailEvidence,
}

/// Caches the probe eigenvalues, which depend only on the kernel and `N`.
#[derive(Clone, Debug)]
pub struct TailClassifier<T> {
    n_max: usize,
    probe_u: Vec<T>,
    probe_lambda: Vec<T>,
}

impl<T: Real> TailClassifier<T> {
    pub fn new(n_max: usize, params: &KernelParams<T>, quad: &QuadratureSpec<T>) -> Result<Self> {
        if n_max < 2 {
            return domain("series truncation must be at least 2");
        }
        let u0 = T::from_usize_lossy(n_max).ln();
        let u1 = T::lit(690.0).min(T::lit(0.97) * T::max_value().ln());
        if !(u1 > u0) {
            return domain("series truncation too large for the probe range of this scalar type");
        }
        let step = (u1 - u0) / T::from_usize_lossy(PROBES - 1);
        let probe_u: Vec<T> = (0..PROBES).map(|i| u0 + step * T::from_usize_lossy(i)).collect();
        let probe_lambda = probe_u
            .iter()
            .map(|&u| eigenvalue_radial(u.exp(), params, quad).map(|(l, _)| l))
            .collect::<Result<_>>()?;
        Ok(Self {
            n_max,
            probe_u,
            probe_lambda,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `λ_{n,0}` at the probe points, for fits and reports.
    pub fn probes(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.probe_u.iter().copied().zip(self.probe_lambda.iter().copied())
    }

    fn log_term(spec: &InitialDataSpec<T>, n: T, lambda: T, lambda_tilde: T, t: T, norm: &NormSpec<T>) -> T {
        let omega = n + n + T::lit(1.5) + T::E();
        norm.log_weight(omega, lambda_tilde) + T::lit(2.0) * spec.log_coeff(n, lambda) - T::lit(2.0) * lambda * t
    }

    pub fn classify(
        &self,
        spec: &InitialDataSpec<T>,
        t: T,
        norm: &NormSpec<T>,
        table: &EigenvalueTable<T>,
        window: usize,
    ) -> Result<TailVerdict> {
        spec.validate()?;
        norm.validate()?;
        if !(t >= T::zero() && t.is_finite()) {
            return domain(format!("t must be finite and nonnegative, got {t}"));
        }
        let big_n = match spec.n_max() {
            None => {
                return Ok(TailVerdict {
                    classification: Verdict::Convergent,
                    reason: "finite mode set".into(),
                    evidence: TailEvidence::default(),
                })
            }
            Some(n) => n,
        };
        if big_n != self.n_max {
            return domain(format!("classifier built for N={}, series has N={big_n}", self.n_max));
        }
        let first = spec.first_index();
        let window = window.min(big_n - first);
        let blocks = BLOCKS.min(window.max(1));
        let mut ev = TailEvidence::default();

        // tabulated range, summed relative to the largest term
        let log_a: Vec<T> = (first..=big_n)
            .map(|n| {
                let lambda = table.lambda(n, 0)?;
                let lt = modified_lambda(n, 0, table)?;
                Ok(Self::log_term(spec, T::from_usize_lossy(n), lambda, lt, t, norm))
            })
            .collect::<Result<_>>()?;
        let shift = log_a.iter().copied().fold(T::neg_infinity(), T::max);
        let mut prefix = Vec::with_capacity(log_a.len());
        let mut acc = CompensatedSum::new();
        for &la in &log_a {
            acc.add((la - shift).exp());
            prefix.push(acc.value());
        }
        let log_s = |n: usize| prefix[n - first].ln() + shift;
        let block = window / blocks;
        let start = big_n - block * blocks;
        let mut prev_block: Option<T> = None;
        for j in 0..=blocks {
            let end = start + j * block;
            ev.block_ends.push(end);
            ev.log_partial_sums.push(log_s(end).to_f64_lossy());
            if j > 0 {
                let b = prefix[end - first] - prefix[end - block - first];
                if let Some(p) = prev_block {
                    ev.block_ratios.push((b / p).to_f64_lossy());
                }
                prev_block = Some(b);
            }
        }
        let log_sn = log_s(big_n);
        ev.window_growth = (log_sn - log_s(start)).exp().to_f64_lossy();

        // asymptotic probes
        let log_b: Vec<T> = self
            .probe_u
            .iter()
            .zip(&self.probe_lambda)
            .map(|(&u, &lam)| u + Self::log_term(spec, u.exp(), lam, lam, t, norm))
            .collect();
        ev.probe_log_n = self.probe_u.iter().map(|u| u.to_f64_lossy()).collect();
        ev.probe_log_b = log_b.iter().map(|x| x.to_f64_lossy()).collect();
        let tail = &log_b[PROBES - TREND_PROBES - 1..];
        ev.probe_ratios = tail.windows(2).map(|w| (w[1] - w[0]).exp().to_f64_lossy()).collect();
        let rising = tail.windows(2).all(|w| w[1] >= w[0]);
        let falling = tail.windows(2).all(|w| w[1] < w[0]);

        let (i, j) = (PROBES - 2, PROBES - 1);
        let kappa = -(log_b[j] - log_b[i]) / (self.probe_u[j].ln() - self.probe_u[i].ln());
        if kappa.is_finite() {
            ev.kappa = Some(kappa.to_f64_lossy());
        }
        if falling && kappa > T::one() {
            let mut integral = CompensatedSum::new();
            for k in 0..PROBES - 1 {
                let h = self.probe_u[k + 1] - self.probe_u[k];
                integral.add(T::lit(0.5) * h * (log_b[k].exp() + log_b[k + 1].exp()));
            }
            let u_last = self.probe_u[j];
            integral.add(log_b[j].exp() * u_last / (kappa - T::one()));
            ev.tail_bound = Some(integral.value().to_f64_lossy());
        }

        let log_tail = ev.tail_bound.map(|b| T::lit(b).ln());
        let (classification, reason) = if rising {
            (Verdict::Divergent, "b(u) nondecreasing over the trailing probes".to_string())
        } else if let Some(lt) = log_tail.filter(|&lt| lt <= T::lit(TAIL_TOL).ln() + log_sn) {
            (
                Verdict::Convergent,
                format!("tail bound {:e} below {TAIL_TOL} of the partial sum", lt.exp().to_f64_lossy()),
            )
        } else if ev.window_growth >= GROWTH_FACTOR
            || (!ev.block_ratios.is_empty() && ev.block_ratios.iter().all(|&r| r >= 1.0))
        {
            (Verdict::Divergent, "partial sums keep growing across the window".to_string())
        } else {
            (Verdict::Inconclusive, "no decisive trend".to_string())
        };
        Ok(TailVerdict {
            classification,
            reason,
            evidence: ev,
        })
    }

    /// Bisection for the time where the verdict stops being divergent, on
    /// `[t_lo, t_hi]` with `t_lo` divergent and `t_hi` not.
    pub fn frontier(
        &self,
        spec: &InitialDataSpec<T>,
        norm: &NormSpec<T>,
        table: &EigenvalueTable<T>,
        window: usize,
        (t_lo, t_hi): (T, T),
        iterations: usize,
    ) -> Result<T> {
        let divergent = |t: T| -> Result<bool> {
            Ok(self.classify(spec, t, norm, table, window)?.classification == Verdict::Divergent)
        };
        let (mut lo, mut hi) = (t_lo, t_hi);
        if !divergent(lo)? || divergent(hi)? {
            return domain(format!("no divergence frontier bracketed by [{t_lo}, {t_hi}]"));
        }
        for _ in 0..iterations {
            let mid = T::lit(0.5) * (lo + hi);
            if divergent(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(T::lit(0.5) * (lo + hi))
    }
}

/// One-shot classification; builds the probes for this call.
pub fn series_tail_classify<T: Real>(
    spec: &InitialDataSpec<T>,
    t: T,
    norm: &NormSpec<T>,
    table: &EigenvalueTable<T>,
    window: usize,
) -> Result<TailVerdict> {
    let n_max = spec.n_max().unwrap_or(2);
    TailClassifier::new(n_max, table.params(), table.quad())?.classify(spec, t, norm, table, window)
}

/// Least-squares slope of `λ_{n,0}` against `log n` over `n_lo ≤ n ≤ n_hi`,
/// the growth constant in `λ_{n,0} ~ γ log n`.
pub fn fit_gamma<T: Real>(table: &EigenvalueTable<T>, n_lo: usize, n_hi: usize) -> Result<T> {
    if !(2 <= n_lo && n_lo < n_hi) {
        return domain(format!("fit range needs 2 <= n_lo < n_hi, got [{n_lo}, {n_hi}]"));
    }
    let pts: Vec<(T, T)> = (n_lo..=n_hi)
        .map(|n| Ok((T::from_usize_lossy(n).ln(), table.lambda(n, 0)?)))
        .collect::<Result<_>>()?;
    let m = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / m;
    let my = pts.iter().map(|p| p.1).sum::<T>() / m;
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}
