use crate::error::{domain, Result};
use crate::scalar::Real;

/// Generalized Laguerre polynomial `L_n^{(α)}(x)` by forward recurrence.
pub fn laguerre<T: Real>(n: usize, alpha: T, x: T) -> Result<T> {
    if !(alpha > -T::one()) {
        return domain(format!("Laguerre parameter alpha={alpha} must exceed -1"));
    }
    if !(x >= T::zero()) {
        return domain(format!("Laguerre argument x={x} must be nonnegative"));
    }
    Ok(laguerre_unchecked(n, alpha, x))
}

pub(crate) fn laguerre_unchecked<T: Real>(n: usize, alpha: T, x: T) -> T {
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = T::one() + alpha - x;
    for k in 1..n {
        let kf = T::from_usize_lossy(k);
        let next = ((kf + kf + T::one() + alpha - x) * cur - (kf + alpha) * prev) / (kf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}
