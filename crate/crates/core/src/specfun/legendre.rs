use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::specfun::gamma::ln_gamma;

/// Largest degree accepted by the unnormalized [`assoc_legendre`].
pub const ASSOC_LEGENDRE_UNNORMALIZED_MAX_L: usize = 150;

fn check_unit<T: Real>(x: T) -> Result<()> {
    if x.abs() <= T::one() {
        Ok(())
    } else {
        domain(format!("Legendre argument {x} outside [-1, 1]"))
    }
}

/// Legendre polynomial `P_l(x)` by the three-term recurrence.
///
/// The result is clamped to `[-1, 1]`, absorbing rounding drift near `x = ±1`.
pub fn legendre<T: Real>(l: usize, x: T) -> Result<T> {
    check_unit(x)?;
    Ok(legendre_unchecked(l, x))
}

pub(crate) fn legendre_unchecked<T: Real>(l: usize, x: T) -> T {
    match l {
        0 => T::one(),
        1 => x,
        _ => {
            let mut prev = T::one();
            let mut cur = x;
            for j in 1..l {
                let jf = T::from_usize_lossy(j);
                let next = ((jf + jf + T::one()) * x * cur - jf * prev) / (jf + T::one());
                prev = cur;
                cur = next;
            }
            cur.max(-T::one()).min(T::one())
        }
    }
}

/// `P_0(x), ..., P_lmax(x)`.
pub fn legendre_upto<T: Real>(lmax: usize, x: T) -> Result<Vec<T>> {
    check_unit(x)?;
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(T::one());
    if lmax >= 1 {
        out.push(x);
    }
    for j in 1..lmax {
        let jf = T::from_usize_lossy(j);
        let next = ((jf + jf + T::one()) * x * out[j] - jf * out[j - 1]) / (jf + T::one());
        out.push(next);
    }
    Ok(out)
}

/// `1 - P_l(cos θ)` without cancellation for small `θ`.
///
/// Uses the hypergeometric series in `sin²(θ/2)` while `l(l+1) sin²(θ/2)` is
/// small, otherwise the recurrence for the deviation from one. Never negative.
pub fn legendre_one_minus_cos<T: Real>(l: usize, theta: T) -> T {
    if l == 0 {
        return T::zero();
    }
    let sh = (theta * T::lit(0.5)).sin();
    let z = sh * sh;
    let lf = T::from_usize_lossy(l);
    let two = T::lit(2.0);
    if lf * (lf + T::one()) * z <= T::lit(0.25) {
        // P_l(cos θ) = 2F1(-l, l+1; 1; z)
        let mut term = T::one();
        let mut acc = T::zero();
        for k in 0..l {
            let kf = T::from_usize_lossy(k);
            term = term * (kf - lf) * (lf + T::one() + kf) / ((kf + T::one()) * (kf + T::one())) * z;
            acc -= term;
            if term.abs() <= T::epsilon() * acc.abs() {
                break;
            }
        }
        return acc.max(T::zero());
    }
    let x = theta.cos();
    let one_minus_x = two * z;
    let mut prev = T::zero(); // Q_0
    let mut cur = one_minus_x; // Q_1
    for j in 1..l {
        let jf = T::from_usize_lossy(j);
        let c = jf + jf + T::one();
        let next = (c * one_minus_x + c * x * cur - jf * prev) / (jf + T::one());
        prev = cur;
        cur = next;
    }
    cur.max(T::zero()).min(two)
}

/// `(1 - P_l(cos(θ/l))) / θ²` for `l ≥ 1`, `0 < θ ≤ π/2`.
pub fn legendre_scaled_gap<T: Real>(l: usize, theta: T) -> Result<T> {
    if l == 0 {
        return domain("legendre_scaled_gap needs l >= 1");
    }
    if !(theta > T::zero() && theta <= T::FRAC_PI_2()) {
        return domain(format!("legendre_scaled_gap needs 0 < theta <= pi/2, got {theta}"));
    }
    let arg = theta / T::from_usize_lossy(l);
    Ok(legendre_one_minus_cos(l, arg) / (theta * theta))
}

fn ln_norm_factor<T: Real>(l: usize, m: usize) -> T {
    let lf = T::from_usize_lossy(l);
    let a = ((lf + lf + T::one()) / (T::lit(4.0) * T::PI())).ln();
    let b = ln_gamma(T::from_usize_lossy(l - m + 1)) - ln_gamma(T::from_usize_lossy(l + m + 1));
    T::lit(0.5) * (a + b)
}

/// `N_{l,m} P_l^m(x)` with `N_{l,m} = √((2l+1)/4π · (l-m)!/(l+m)!)`.
///
/// Stable for large degree: the normalization is fused into the recurrence,
/// so no factorial is ever formed.
pub fn assoc_legendre_normalized<T: Real>(l: usize, m: usize, x: T) -> Result<T> {
    if m > l {
        return domain(format!("associated Legendre order m={m} exceeds degree l={l}"));
    }
    check_unit(x)?;
    let one = T::one();
    let two = T::lit(2.0);
    let sin2 = ((one - x) * (one + x)).max(T::zero());
    // \bar P_m^m = √((2m+1)/4π) ∏_{k=1}^{m} √((2k-1)/(2k)) (1-x²)^{m/2}
    let mut pmm = (one / (T::lit(4.0) * T::PI())).sqrt();
    let sin = sin2.sqrt();
    for k in 1..=m {
        let kf = T::from_usize_lossy(k);
        pmm = pmm * ((two * kf - one) / (two * kf)).sqrt() * sin;
    }
    let mf = T::from_usize_lossy(m);
    pmm *= (two * mf + one).sqrt();
    if l == m {
        return Ok(pmm);
    }
    let mut prev = pmm;
    let mut cur = x * (two * mf + T::lit(3.0)).sqrt() * pmm;
    for j in (m + 2)..=l {
        let jf = T::from_usize_lossy(j);
        let a = ((T::lit(4.0) * jf * jf - one) / (jf * jf - mf * mf)).sqrt();
        let jm = jf - one;
        let a_prev = ((T::lit(4.0) * jm * jm - one) / (jm * jm - mf * mf)).sqrt();
        let next = a * (x * cur - prev / a_prev);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Unnormalized associated Legendre function `P_l^m(x)`, without the
/// Condon–Shortley phase. Degrees above [`ASSOC_LEGENDRE_UNNORMALIZED_MAX_L`]
/// are refused; use [`assoc_legendre_normalized`] there.
pub fn assoc_legendre<T: Real>(l: usize, m: usize, x: T) -> Result<T> {
    if l > ASSOC_LEGENDRE_UNNORMALIZED_MAX_L {
        return domain(format!(
            "unnormalized associated Legendre limited to l <= {ASSOC_LEGENDRE_UNNORMALIZED_MAX_L}"
        ));
    }
    let normalized = assoc_legendre_normalized(l, m, x)?;
    Ok(normalized / ln_norm_factor::<T>(l, m).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;
    use proptest::prelude::*;

    /// Explicit sum P_l(x) = 2^{-l} Σ_k (-1)^k C(l,k) C(2l-2k,l) x^{l-2k}.
    fn legendre_explicit(l: usize, x: f64) -> f64 {
        let binom = |n: usize, k: usize| -> f64 {
            (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
        };
        let mut acc = 0.0;
        for k in 0..=l / 2 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom(l, k) * binom(2 * l - 2 * k, l) * x.powi((l - 2 * k) as i32);
        }
        acc / 2f64.powi(l as i32)
    }

    #[test]
    fn spot_values() {
        assert_eq!(legendre(0, 0.7).unwrap(), 1.0);
        assert_eq!(legendre(1, 0.5).unwrap(), 0.5);
        assert!((legendre(2, 0.3f64).unwrap() + 0.365).abs() < 1e-15);
        assert!(legendre(3, 1.5f64).is_err());
    }

    #[test]
    fn assoc_spot_values() {
        assert!((assoc_legendre(1, 1, 0.0f64).unwrap() - 1.0).abs() < 1e-14);
        assert!((assoc_legendre(2, 0, 0.3f64).unwrap() + 0.365).abs() < 1e-14);
        assert!((assoc_legendre(2, 2, 0.0f64).unwrap() - 3.0).abs() < 1e-13);
        assert!(assoc_legendre(2, 3, 0.1f64).is_err());
        assert!(assoc_legendre(151, 0, 0.1f64).is_err());
        assert!(assoc_legendre_normalized(151, 3, 0.1f64).is_ok());
    }

    #[test]
    fn assoc_matches_closed_forms() {
        // no Condon–Shortley phase: P_2^1 = 3x√(1-x²), P_3^2 = 15x(1-x²), P_3^3 = 15(1-x²)^{3/2}
        for &x in &[-0.9, -0.3, 0.0, 0.45, 0.8f64] {
            let s = (1.0 - x * x).sqrt();
            assert!((assoc_legendre(2, 1, x).unwrap() - 3.0 * x * s).abs() < 1e-13);
            assert!((assoc_legendre(3, 2, x).unwrap() - 15.0 * x * s * s).abs() < 1e-12);
            assert!((assoc_legendre(3, 3, x).unwrap() - 15.0 * s * s * s).abs() < 1e-12);
        }
    }

    #[test]
    fn recurrence_matches_explicit_formula() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x: f64 = rng.gen_range(-1.0..=1.0);
            for l in 0..=8 {
                let a = legendre(l, x).unwrap();
                let b = legendre_explicit(l, x);
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-3), "l={l} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn orthogonality_under_gauss_legendre() {
        let rule = gauss_legendre::<f64>(60);
        for l in 0..=50 {
            for lp in l..=50 {
                let got = rule.integrate(-1.0, 1.0, |x| legendre(l, x).unwrap() * legendre(lp, x).unwrap());
                let expect = if l == lp { 2.0 / (2 * l + 1) as f64 } else { 0.0 };
                assert!((got - expect).abs() < 1e-10, "l={l} l'={lp}: {got}");
            }
        }
    }

    #[test]
    fn bounded_at_high_degree() {
        let xs: Vec<f64> = (0..=400).map(|i| -1.0 + i as f64 / 200.0).collect();
        for &l in &[10usize, 100, 1000, 10_000] {
            for &x in &xs {
                assert!(legendre(l, x).unwrap().abs() <= 1.0);
            }
        }
    }

    #[test]
    fn upto_agrees_with_single() {
        let v = legendre_upto(30, 0.37f64).unwrap();
        for (l, p) in v.iter().enumerate() {
            assert!((p - legendre(l, 0.37).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn one_minus_cos_both_branches() {
        for &l in &[1usize, 2, 5, 40, 300] {
            for &theta in &[1e-6, 1e-3, 0.01, 0.2, 0.7, 1.5f64] {
                let direct = 1.0 - legendre(l, theta.cos()).unwrap();
                let got = legendre_one_minus_cos(l, theta);
                assert!((got - direct).abs() < 1e-13 * (l * l) as f64, "l={l} theta={theta}: {got} vs {direct}");
            }
        }
        // small-angle limit l(l+1)θ²/4
        let got = legendre_one_minus_cos(7, 1e-7f64);
        assert!((got / 1e-14 - 56.0 / 4.0).abs() < 1e-7);
    }

    #[test]
    fn scaled_gap_values() {
        let v = legendre_scaled_gap(1, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((v - 4.0 / std::f64::consts::PI.powi(2)).abs() < 1e-15);
        let t = std::f64::consts::FRAC_PI_4;
        let c = (t / 2.0).cos();
        let expect = (1.0 - (3.0 * c * c - 1.0) / 2.0) / (t * t);
        assert!((legendre_scaled_gap(2, t).unwrap() - expect).abs() < 1e-14);
        assert!(legendre_scaled_gap(3, 0.0f64).is_err());
        assert!(legendre_scaled_gap(0, 0.5f64).is_err());
    }

    #[test]
    fn scaled_gap_mehler_heine() {
        // J_0(1) by its power series
        let mut j0 = 0.0;
        let mut term = 1.0f64;
        for k in 0..30 {
            if k > 0 {
                term *= -0.25 / (k as f64 * k as f64);
            }
            j0 += term;
        }
        let v = legendre_scaled_gap(500, 1.0f64).unwrap();
        assert!((v - (1.0 - j0)).abs() < 1e-3, "{v} vs {}", 1.0 - j0);
    }

    proptest! {
        #[test]
        fn normalized_matches_unnormalized(l in 0usize..60, m_frac in 0.0f64..1.0, x in -1.0f64..1.0) {
            let m = ((l as f64) * m_frac).floor() as usize;
            let n = assoc_legendre_normalized(l, m, x).unwrap();
            let u = assoc_legendre(l, m, x).unwrap();
            let norm = ln_norm_factor::<f64>(l, m).exp();
            prop_assert!((n - u * norm).abs() <= 1e-12 * n.abs().max(1e-12));
        }
    }
}
