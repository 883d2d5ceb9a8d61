use num_complex::Complex;

use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::specfun::legendre::assoc_legendre_normalized;

/// Direction on the unit sphere, `σ = (cos θ, sin θ cos φ, sin θ sin φ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalDirection<T> {
    theta: T,
    phi: T,
}

impl<T: Real> SphericalDirection<T> {
    pub fn new(theta: T, phi: T) -> Result<Self> {
        if !(theta >= T::zero() && theta <= T::PI()) {
            return domain(format!("colatitude {theta} outside [0, pi]"));
        }
        if !(phi >= T::zero() && phi < T::TAU()) {
            return domain(format!("azimuth {phi} outside [0, 2pi)"));
        }
        Ok(Self { theta, phi })
    }

    /// Direction of a nonzero vector; the zero vector maps to `θ = 0`.
    pub fn from_vector(v: [T; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r == T::zero() {
            return Self {
                theta: T::zero(),
                phi: T::zero(),
            };
        }
        let cos_t = (v[0] / r).max(-T::one()).min(T::one());
        let mut phi = v[2].atan2(v[1]);
        if phi < T::zero() {
            phi += T::TAU();
        }
        if phi >= T::TAU() {
            phi = T::zero();
        }
        Self {
            theta: cos_t.acos(),
            phi,
        }
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn unit_vector(&self) -> [T; 3] {
        let (s, c) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [c, s * cp, s * sp]
    }
}

/// `Y_l^m(σ) = N_{l,m} P_l^{|m|}(cos θ) e^{imφ}` (no Condon–Shortley phase).
pub fn spherical_harmonic<T: Real>(l: usize, m: i64, dir: &SphericalDirection<T>) -> Result<Complex<T>> {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return domain(format!("|m|={am} exceeds l={l}"));
    }
    Ok(spherical_harmonic_cos(l, m, dir.theta.cos(), dir.phi))
}

/// Same as [`spherical_harmonic`] given `cos θ` directly; `|m| <= l` assumed.
pub(crate) fn spherical_harmonic_cos<T: Real>(l: usize, m: i64, cos_theta: T, phi: T) -> Complex<T> {
    let am = m.unsigned_abs() as usize;
    let p = assoc_legendre_normalized(l, am, cos_theta.max(-T::one()).min(T::one())).unwrap_or_else(|_| T::zero());
    let angle = T::from_i64(m).expect("order fits scalar") * phi;
    Complex::new(p * angle.cos(), p * angle.sin())
}
