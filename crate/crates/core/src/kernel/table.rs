use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};
use crate::quadrature::{gauss_legendre, Rule};
use crate::scalar::{CompensatedSum, Real};
use crate::specfun::legendre_one_minus_cos;
use crate::specfun::legendre::legendre_unchecked;

use super::engine::eigenvalue;
use super::integrand::beta_unchecked;
use super::{degree, is_null_mode, KernelParams, QuadratureSpec, CODE_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueEntry<T> {
    pub n: usize,
    pub l: usize,
    pub lambda: T,
    pub err_estimate: T,
}

impl<T: Real> EigenvalueEntry<T> {
    fn check(&self) -> Result<()> {
        let ok_sign = self.lambda.is_finite() && self.lambda >= T::zero();
        let ok_null = (self.lambda == T::zero()) == is_null_mode(self.n, self.l);
        let ok_err = self.err_estimate.is_finite() && self.err_estimate >= T::zero();
        if ok_sign && ok_null && ok_err {
            Ok(())
        } else {
            domain(format!(
                "invalid eigenvalue entry ({}, {}): lambda={} err={}",
                self.n, self.l, self.lambda, self.err_estimate
            ))
        }
    }
}

/// Eigenvalues keyed by `(n, l)`. Lookups outside the stored set fail; the
/// table never extrapolates.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueTable<T> {
    params: KernelParams<T>,
    quad: QuadratureSpec<T>,
    entries: BTreeMap<(usize, usize), EigenvalueEntry<T>>,
    version: String,
}

impl<T: Real> EigenvalueTable<T> {
    pub fn from_entries<I>(params: KernelParams<T>, quad: QuadratureSpec<T>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = EigenvalueEntry<T>>,
    {
        let mut map = BTreeMap::new();
        for e in entries {
            e.check()?;
            if map.insert((e.n, e.l), e).is_some() {
                return domain(format!("duplicate eigenvalue entry ({}, {})", e.n, e.l));
            }
        }
        Ok(Self {
            params,
            quad,
            entries: map,
            version: version_hash(&params, &quad),
        })
    }

    pub fn params(&self) -> &KernelParams<T> {
        &self.params
    }

    pub fn quad(&self) -> &QuadratureSpec<T> {
        &self.quad
    }

    /// Hex SHA-256 over the kernel parameters, the quadrature spec and [`CODE_VERSION`].
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, n: usize, l: usize) -> Result<&EigenvalueEntry<T>> {
        self.entries.get(&(n, l)).ok_or(Error::MissingEigenvalue { n, l })
    }

    pub fn lambda(&self, n: usize, l: usize) -> Result<T> {
        self.get(n, l).map(|e| e.lambda)
    }

    /// Entries in `(n, l)` order.
    pub fn entries(&self) -> impl Iterator<Item = &EigenvalueEntry<T>> {
        self.entries.values()
    }

    pub fn covers(&self, nmax: usize, lmax: usize) -> bool {
        (0..=nmax).all(|n| (0..=lmax).all(|l| self.entries.contains_key(&(n, l))))
    }

    /// The entries with `n ≤ nmax` and `l ≤ lmax`.
    pub fn restrict(&self, nmax: usize, lmax: usize) -> Self {
        Self {
            params: self.params,
            quad: self.quad,
            entries: self
                .entries
                .iter()
                .filter(|((n, l), _)| *n <= nmax && *l <= lmax)
                .map(|(k, v)| (*k, *v))
                .collect(),
            version: self.version.clone(),
        }
    }
}

pub(crate) fn version_hash<T: Real>(params: &KernelParams<T>, quad: &QuadratureSpec<T>) -> String {
    let canonical = format!(
        "{CODE_VERSION};s={:?};theta_max={:?};rel_tol={:?};abs_tol={:?};max_panels={};nodes_per_panel={}",
        params.s().to_f64_lossy(),
        params.theta_max().to_f64_lossy(),
        quad.rel_tol.to_f64_lossy(),
        quad.abs_tol.to_f64_lossy(),
        quad.max_panels,
        quad.nodes_per_panel
    );
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// One quadrature node of the shared grid. Powers are split as
/// `x^{2n+l} = x^{2n} x^l`: the `l` factors are stored, the `2n` ones are
/// formed per row, which keeps memory linear in `lmax` rather than in `nmax`.
struct NodeData<T> {
    weight: T,
    half_log_cos2: T,
    log_sin: T,
    one_minus_cos_pow: Vec<T>,
    cos_pow: Vec<T>,
    sin_pow: Vec<T>,
    legendre_sin: Vec<T>,
    one_minus_legendre_cos: Vec<T>,
}

impl<T: Real> NodeData<T> {
    fn new(theta: T, weight: T, lmax: usize, log_power: T) -> Self {
        let sin = theta.sin();
        let half_log_cos2 = T::lit(0.5) * (-sin * sin).ln_1p();
        let log_sin = sin.ln();
        let mut one_minus_cos_pow = Vec::with_capacity(lmax + 1);
        let mut cos_pow = Vec::with_capacity(lmax + 1);
        let mut sin_pow = Vec::with_capacity(lmax + 1);
        for l in 0..=lmax {
            let lf = T::from_usize_lossy(l);
            one_minus_cos_pow.push(-(lf * half_log_cos2).exp_m1());
            cos_pow.push((lf * half_log_cos2).exp());
            sin_pow.push((lf * log_sin).exp());
        }
        let legendre_sin = (0..=lmax).map(|l| legendre_unchecked(l, sin)).collect();
        let one_minus_legendre_cos = (0..=lmax).map(|l| legendre_one_minus_cos(l, theta)).collect();
        Self {
            weight: weight * beta_unchecked(theta, log_power),
            half_log_cos2,
            log_sin,
            one_minus_cos_pow,
            cos_pow,
            sin_pow,
            legendre_sin,
            one_minus_legendre_cos,
        }
    }

    /// Adds the weighted bracket of every `l` in row `n` to `acc`.
    #[inline]
    fn accumulate_row(&self, n: usize, acc: &mut [CompensatedSum<T>]) {
        let two_n = T::from_usize_lossy(2 * n);
        let x = two_n * self.half_log_cos2;
        let c2n = x.exp();
        let omc2n = -x.exp_m1();
        let s2n = (two_n * self.log_sin).exp();
        for (l, a) in acc.iter_mut().enumerate() {
            let omc = omc2n + c2n * self.one_minus_cos_pow[l];
            let c = c2n * self.cos_pow[l];
            let sk = s2n * self.sin_pow[l];
            let b = omc + c * self.one_minus_legendre_cos[l] - sk * self.legendre_sin[l];
            a.add(self.weight * b.max(T::zero()));
        }
    }
}

/// Dyadic panels refined into equal subpanels narrow enough for the fastest
/// oscillation in the table, deep enough that the remainder near zero is
/// negligible. Returns `(nodes, weights, remainder bound)`.
fn shared_grid<T: Real>(kmax: usize, lmax: usize, params: &KernelParams<T>, rule: &Rule<T>) -> (Vec<T>, Vec<T>, T) {
    let half = T::lit(0.5);
    let freq = T::lit(1.5) * T::from_usize_lossy(lmax) + T::lit(2.0) * T::from_usize_lossy(kmax).sqrt() + T::lit(2.0);
    let h = T::lit(6.0) / freq;
    // bracket ≤ c θ² near zero
    let c = T::from_usize_lossy(kmax) * half + T::from_usize_lossy(lmax * (lmax + 1)) * T::lit(0.25) + T::one();
    let p = params.log_power();
    let cutoff = T::lit(1e-22);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut b = T::FRAC_PI_4();
    let mut remainder = T::zero();
    for _ in 0..2000 {
        let a = b * half;
        let bound = (b - a) * c * b * b * beta_unchecked(a, p).max(beta_unchecked(b, p));
        if bound < cutoff && a < T::lit(1e-3) {
            // the remaining geometric tail is at most bound / 3
            remainder = bound;
            break;
        }
        let m = ((b - a) / h).ceil().to_usize().unwrap_or(1).max(1);
        let step = (b - a) / T::from_usize_lossy(m);
        for i in 0..m {
            let lo = a + step * T::from_usize_lossy(i);
            let hi = lo + step;
            let mid = half * (lo + hi);
            let rad = half * (hi - lo);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(mid + rad * *x);
                weights.push(rad * *w);
            }
        }
        b = a;
    }
    (nodes, weights, remainder)
}

fn batched_rows<T: Real>(
    nmax: usize,
    lmax: usize,
    params: &KernelParams<T>,
    quad: &QuadratureSpec<T>,
    parallel: bool,
) -> Vec<Vec<(T, T)>> {
    let kmax = degree(nmax, lmax);
    let fine_rule = gauss_legendre::<T>(quad.nodes_per_panel);
    let coarse_rule = gauss_legendre::<T>((quad.nodes_per_panel * 3 / 4).max(8));
    let p = params.log_power();
    let make = |rule: &Rule<T>| -> (Vec<NodeData<T>>, T) {
        let (nodes, weights, rem) = shared_grid(kmax, lmax, params, rule);
        let data = if parallel {
            nodes
                .par_iter()
                .zip(weights.par_iter())
                .map(|(&t, &w)| NodeData::new(t, w, lmax, p))
                .collect()
        } else {
            nodes.iter().zip(&weights).map(|(&t, &w)| NodeData::new(t, w, lmax, p)).collect()
        };
        (data, rem)
    };
    let (fine, remainder) = make(&fine_rule);
    let (coarse, _) = make(&coarse_rule);
    let row = |n: usize| -> Vec<(T, T)> {
        let accumulate = |grid: &[NodeData<T>]| -> Vec<T> {
            let mut acc: Vec<CompensatedSum<T>> = (0..=lmax).map(|_| CompensatedSum::new()).collect();
            for node in grid {
                node.accumulate_row(n, &mut acc);
            }
            acc.iter().map(|a| a.value()).collect()
        };
        let f = accumulate(&fine);
        let c = accumulate(&coarse);
        f.into_iter().zip(c).map(|(f, c)| (f, (f - c).abs() + remainder)).collect()
    };
    if parallel {
        (0..=nmax).into_par_iter().map(row).collect()
    } else {
        (0..=nmax).map(row).collect()
    }
}

fn build_table<T: Real>(
    nmax: usize,
    lmax: usize,
    params: &KernelParams<T>,
    quad: &QuadratureSpec<T>,
    parallel: bool,
) -> Result<EigenvalueTable<T>> {
    quad.validate()?;
    let rows = batched_rows(nmax, lmax, params, quad, parallel);
    let finish = |(n, l): (usize, usize)| -> Result<EigenvalueEntry<T>> {
        if is_null_mode(n, l) {
            return eigenvalue(n, l, params, quad);
        }
        let (lambda, err) = rows[n][l];
        if err <= quad.abs_tol.max(quad.rel_tol * lambda) {
            Ok(EigenvalueEntry {
                n,
                l,
                lambda,
                err_estimate: err,
            })
        } else {
            // the shared grid could not certify this entry; integrate it on its own
            eigenvalue(n, l, params, quad)
        }
    };
    let keys: Vec<(usize, usize)> = (0..=nmax).flat_map(|n| (0..=lmax).map(move |l| (n, l))).collect();
    let entries: Vec<Result<EigenvalueEntry<T>>> = if parallel {
        keys.par_iter().map(|&k| finish(k)).collect()
    } else {
        keys.iter().map(|&k| finish(k)).collect()
    };
    let entries: Vec<EigenvalueEntry<T>> = entries.into_iter().collect::<Result<_>>()?;
    EigenvalueTable::from_entries(*params, *quad, entries)
}

/// All `λ_{n,l}` with `n ≤ nmax`, `l ≤ lmax`, built in parallel.
///
/// Every entry is computed independently of the others and of the thread
/// schedule, so the result equals [`eigenvalue_table_serial`] exactly.
pub fn eigenvalue_table<T: Real>(
    nmax: usize,
    lmax: usize,
    params: &KernelParams<T>,
    quad: &QuadratureSpec<T>,
) -> Result<EigenvalueTable<T>> {
    build_table(nmax, lmax, params, quad, true)
}

pub fn eigenvalue_table_serial<T: Real>(
    nmax: usize,
    lmax: usize,
    params: &KernelParams<T>,
    quad: &QuadratureSpec<T>,
) -> Result<EigenvalueTable<T>> {
    build_table(nmax, lmax, params, quad, false)
}

/// `(s/2) (log √(2n+l))^{2/s}`, the leading large-degree behaviour of `λ_{n,0}`.
pub fn asymptotic_leading<T: Real>(n: usize, l: usize, params: &KernelParams<T>) -> Result<T> {
    let k = degree(n, l);
    if k < 3 {
        return domain(format!("asymptotic form needs 2n+l >= 3, got {k}"));
    }
    Ok(leading(T::from_usize_lossy(k), params))
}

/// [`asymptotic_leading`] for `l = 0` and real `n ≥ 3/2`.
pub fn asymptotic_leading_radial<T: Real>(n: T, params: &KernelParams<T>) -> Result<T> {
    if !(n >= T::lit(1.5)) {
        return domain(format!("asymptotic form needs 2n >= 3, got n={n}"));
    }
    Ok(leading(n + n, params))
}

fn leading<T: Real>(k: T, params: &KernelParams<T>) -> T {
    let s = params.s();
    s * T::lit(0.5) * (T::lit(0.5) * k.ln()).powf(T::lit(2.0) / s)
}

/// `(log(2n+l+e))^{2/s}`, the comparison scale for the two-sided eigenvalue bound.
pub fn log_bound<T: Real>(n: usize, l: usize, s: T) -> T {
    (T::from_usize_lossy(degree(n, l)) + T::E()).ln().powf(T::lit(2.0) / s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioBounds<T> {
    pub c_min: T,
    pub c_max: T,
    pub argmin: (usize, usize),
    pub argmax: (usize, usize),
}

/// Extremes of `λ_{n,l} / (log(2n+l+e))^{2/s}` over the stored modes with `n + l ≥ 2`.
pub fn ratio_bounds<T: Real>(table: &EigenvalueTable<T>) -> Result<RatioBounds<T>> {
    let s = table.params().s();
    let mut best: Option<RatioBounds<T>> = None;
    for e in table.entries().filter(|e| !is_null_mode(e.n, e.l)) {
        let r = e.lambda / log_bound(e.n, e.l, s);
        let key = (e.n, e.l);
        best = Some(match best {
            None => RatioBounds {
                c_min: r,
                c_max: r,
                argmin: key,
                argmax: key,
            },
            Some(mut b) => {
                if r < b.c_min {
                    b.c_min = r;
                    b.argmin = key;
                }
                if r > b.c_max {
                    b.c_max = r;
                    b.argmax = key;
                }
                b
            }
        });
    }
    best.ok_or_else(|| Error::Domain("ratio bounds need an entry with n+l >= 2".into()))
}

/// Entries with `n + l ≥ 2` lying below the gap: `λ_{n,l} < λ_{2,0} - err`,
/// where `err` combines both error estimates.
pub fn gap_violations<T: Real>(table: &EigenvalueTable<T>) -> Result<Vec<EigenvalueEntry<T>>> {
    let gap = *table.get(2, 0)?;
    Ok(table
        .entries()
        .filter(|e| !is_null_mode(e.n, e.l))
        .filter(|e| e.lambda < gap.lambda - (gap.err_estimate + e.err_estimate))
        .copied()
        .collect())
}
