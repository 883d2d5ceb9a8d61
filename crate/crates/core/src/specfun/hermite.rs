use crate::scalar::Real;

/// L²-orthonormal Hermite function for the oscillator `-d²/dx² + x²/4`:
/// `h_n(x) = He_n(x) e^{-x²/4} / √(n! √(2π))`, eigenvalue `n + 1/2`.
pub fn hermite_osc<T: Real>(n: usize, x: T) -> T {
    let h0 = (T::lit(2.0) * T::PI()).powf(T::lit(-0.25)) * (-x * x * T::lit(0.25)).exp();
    if n == 0 {
        return h0;
    }
    let mut prev = h0;
    let mut cur = x * h0;
    for k in 1..n {
        let kf = T::from_usize_lossy(k);
        let next = (x * cur - kf.sqrt() * prev) / (kf + T::one()).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}
