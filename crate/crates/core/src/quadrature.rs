//! Gaussian quadrature rules and the panel-adaptive integrator.
//!
//! Nodes are computed by Newton iteration on the three-term recurrences, so
//! every rule is available in any [`Real`] precision.

use crate::scalar::Real;
use crate::specfun::gamma::ln_gamma;

const MAX_NEWTON: usize = 100;

/// Nodes and weights of a quadrature rule.
#[derive(Clone, Debug)]
pub struct Rule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Rule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies a rule defined on `[-1, 1]` to the interval `[a, b]`.
    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = T::lit(0.5) * (b - a);
        let mid = T::lit(0.5) * (b + a);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Gauss–Legendre rule with `n` nodes on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> Rule<T> {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::from_usize_lossy(n);
    let tol = T::epsilon() * T::lit(4.0);
    for i in 0..n.div_ceil(2) {
        let mut z = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..MAX_NEWTON {
            let (p, p_prev) = legendre_pair(n, z);
            dp = nf * (z * p - p_prev) / (z * z - T::one());
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= tol {
                break;
            }
        }
        let (p, p_prev) = legendre_pair(n, z);
        dp = if p.is_finite() { nf * (z * p - p_prev) / (z * z - T::one()) } else { dp };
        let w = T::lit(2.0) / ((T::one() - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    Rule { nodes, weights }
}

fn legendre_pair<T: Real>(n: usize, z: T) -> (T, T) {
    let mut p1 = T::one();
    let mut p2 = T::zero();
    for j in 1..=n {
        let jf = T::from_usize_lossy(j);
        let p3 = p2;
        p2 = p1;
        p1 = ((T::lit(2.0) * jf - T::one()) * z * p2 - (jf - T::one()) * p3) / jf;
    }
    (p1, p2)
}

/// Generalized Gauss–Laguerre rule for `∫_0^∞ x^α e^{-x} f(x) dx`.
pub fn gauss_laguerre<T: Real>(n: usize, alpha: T) -> Rule<T> {
    assert!(n >= 1, "rule needs at least one node");
    assert!(alpha > -T::one(), "alpha must exceed -1");
    let nf = T::from_usize_lossy(n);
    let mut nodes: Vec<T> = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let tol = T::epsilon() * T::lit(8.0);
    let lnorm = ln_gamma(alpha + nf) - ln_gamma(nf);
    let mut z = T::zero();
    for i in 0..n {
        z = match i {
            0 => {
                (T::one() + alpha) * (T::lit(3.0) + T::lit(0.92) * alpha)
                    / (T::one() + T::lit(2.4) * nf + T::lit(1.8) * alpha)
            }
            1 => z + (T::lit(15.0) + T::lit(6.25) * alpha) / (T::one() + T::lit(0.9) * alpha + T::lit(2.5) * nf),
            _ => {
                let ai = T::from_usize_lossy(i - 1);
                z + ((T::one() + T::lit(2.55) * ai) / (T::lit(1.9) * ai)
                    + T::lit(1.26) * ai * alpha / (T::one() + T::lit(3.5) * ai))
                    * (z - nodes[i - 2])
                    / (T::one() + T::lit(0.3) * alpha)
            }
        };
        let mut dp = T::one();
        let mut p_prev = T::one();
        for _ in 0..MAX_NEWTON {
            let (p, pm) = laguerre_pair(n, alpha, z);
            p_prev = pm;
            dp = (nf * p - (nf + alpha) * pm) / z;
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= tol * z.abs().max(T::one()) {
                break;
            }
        }
        let (p, pm) = laguerre_pair(n, alpha, z);
        if p.is_finite() {
            dp = (nf * p - (nf + alpha) * pm) / z;
            p_prev = pm;
        }
        nodes.push(z);
        weights.push(-(lnorm.exp()) / (dp * nf * p_prev));
    }
    Rule { nodes, weights }
}

fn laguerre_pair<T: Real>(n: usize, alpha: T, z: T) -> (T, T) {
    let mut p1 = T::one();
    let mut p2 = T::zero();
    for j in 1..=n {
        let jf = T::from_usize_lossy(j);
        let p3 = p2;
        p2 = p1;
        p1 = ((T::lit(2.0) * jf - T::one() + alpha - z) * p2 - (jf - T::one() + alpha) * p3) / jf;
    }
    (p1, p2)
}

/// Gauss–Hermite rule for `∫ e^{-x²} f(x) dx`, nodes ascending.
pub fn gauss_hermite<T: Real>(n: usize) -> Rule<T> {
    assert!(n >= 1, "rule needs at least one node");
    let nf = T::from_usize_lossy(n);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    // roots stored largest first while iterating, mirrored at the end
    let mut roots: Vec<T> = Vec::with_capacity(n.div_ceil(2));
    let tol = T::epsilon() * T::lit(8.0);
    let mut z = T::zero();
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => {
                let m = T::lit(2.0) * nf + T::one();
                m.sqrt() - T::lit(1.85575) * m.powf(T::lit(-1.0 / 6.0))
            }
            1 => z - T::lit(1.14) * nf.powf(T::lit(0.426)) / z,
            2 => T::lit(1.86) * z - T::lit(0.86) * roots[0],
            3 => T::lit(1.91) * z - T::lit(0.91) * roots[1],
            _ => T::lit(2.0) * z - roots[i - 2],
        };
        let mut dp = T::one();
        for _ in 0..MAX_NEWTON {
            let (p, pm) = hermite_pair(n, z);
            dp = (T::lit(2.0) * nf).sqrt() * pm;
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= tol * z.abs().max(T::one()) {
                break;
            }
        }
        let (_, pm) = hermite_pair(n, z);
        let d = (T::lit(2.0) * nf).sqrt() * pm;
        if d.is_finite() && d != T::zero() {
            dp = d;
        }
        roots.push(z);
        let w = T::lit(2.0) / (dp * dp);
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    Rule { nodes, weights }
}

fn hermite_pair<T: Real>(n: usize, z: T) -> (T, T) {
    let mut p1 = T::PI().powf(T::lit(-0.25));
    let mut p2 = T::zero();
    for j in 1..=n {
        let jf = T::from_usize_lossy(j);
        let p3 = p2;
        p2 = p1;
        p1 = z * (T::lit(2.0) / jf).sqrt() * p2 - ((jf - T::one()) / jf).sqrt() * p3;
    }
    (p1, p2)
}

/// Outcome of one adaptive integration over a single interval.
#[derive(Clone, Copy, Debug)]
pub struct PanelResult<T> {
    pub value: T,
    pub err: T,
    pub leaves: usize,
    /// False when the depth limit was hit before the tolerance was met.
    pub converged: bool,
}

/// Recursive bisection with the "whole vs. two halves" Gauss error estimate.
///
/// `coarse` is the rule applied to the whole interval, if the caller already has
/// it. The accepted value is always the finer (two-halves) sum.
pub fn adaptive_panel<T: Real, F: FnMut(T) -> T>(
    rule: &Rule<T>,
    f: &mut F,
    a: T,
    b: T,
    coarse: Option<T>,
    tol: T,
    max_depth: usize,
) -> PanelResult<T> {
    let whole = coarse.unwrap_or_else(|| rule.integrate(a, b, &mut *f));
    let mid = T::lit(0.5) * (a + b);
    let left = rule.integrate(a, mid, &mut *f);
    let right = rule.integrate(mid, b, &mut *f);
    let fine = left + right;
    let diff = (whole - fine).abs();
    // rounding floor: no estimate below a few ulps of the panel value
    let floor = T::epsilon() * T::lit(16.0) * fine.abs();
    if diff <= tol.max(floor) {
        return PanelResult {
            value: fine,
            err: diff,
            leaves: 2,
            converged: true,
        };
    }
    if max_depth == 0 {
        return PanelResult {
            value: fine,
            err: diff,
            leaves: 2,
            converged: false,
        };
    }
    let half_tol = tol * T::lit(0.5);
    let l = adaptive_panel(rule, f, a, mid, Some(left), half_tol, max_depth - 1);
    let r = adaptive_panel(rule, f, mid, b, Some(right), half_tol, max_depth - 1);
    PanelResult {
        value: l.value + r.value,
        err: l.err + r.err,
        leaves: l.leaves + r.leaves,
        converged: l.converged && r.converged,
    }
}
