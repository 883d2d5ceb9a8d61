use crate::scalar::Real;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = T::PI();
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    half * (T::lit(2.0) * T::PI()).ln() + (x + half) * t.ln() - t + acc.ln()
}

/// `ln(n!)`, exact summation for small `n`.
pub fn ln_factorial<T: Real>(n: usize) -> T {
    if n < 32 {
        let mut acc = T::zero();
        for k in 2..=n {
            acc += T::from_usize_lossy(k).ln();
        }
        acc
    } else {
        ln_gamma(T::from_usize_lossy(n + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_values() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((ln_gamma(0.5f64) - sqrt_pi.ln()).abs() < 1e-14);
        assert!((ln_gamma(2.5f64) - (0.75 * sqrt_pi).ln()).abs() < 1e-14);
        assert!((ln_gamma(1.5f64) - (0.5 * sqrt_pi).ln()).abs() < 1e-14);
    }

    #[test]
    fn matches_factorials() {
        let mut f = 1.0f64;
        for n in 1..25usize {
            f *= n as f64;
            let lg = ln_gamma((n + 1) as f64);
            assert!((lg - f.ln()).abs() < 1e-12 * f.ln().max(1.0), "n={n}");
            assert!((ln_factorial::<f64>(n) - f.ln()).abs() < 1e-13 * f.ln().max(1.0));
        }
        assert!((ln_factorial::<f64>(40) - ln_gamma(41.0f64)).abs() < 1e-12);
    }
}
