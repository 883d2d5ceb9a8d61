use num_complex::Complex;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_laguerre, gauss_legendre};
use crate::scalar::{CompensatedSum, Real};
use crate::specfun::gamma::{ln_factorial, ln_gamma};
use crate::specfun::harmonics::spherical_harmonic_cos;
use crate::specfun::laguerre::laguerre_unchecked;

use super::field::ModeIndex;

/// `ln c_{n,l}` with `c_{n,l} = (n! / (√2 Γ(n+l+3/2)))^{1/2}`.
fn ln_radial_norm<T: Real>(n: usize, l: usize) -> T {
    let nl = T::from_usize_lossy(n + l);
    T::lit(0.5) * (ln_factorial::<T>(n) - T::lit(0.5) * T::LN_2() - ln_gamma(nl + T::lit(1.5)))
}

fn polar<T: Real>(v: [T; 3]) -> (T, T, T) {
    let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let r = r2.sqrt();
    if r == T::zero() {
        return (T::zero(), T::one(), T::zero());
    }
    let cos_t = (v[0] / r).max(-T::one()).min(T::one());
    let mut phi = v[2].atan2(v[1]);
    if phi < T::zero() {
        phi += T::TAU();
    }
    (r, cos_t, phi)
}

fn minus_i_pow<T: Real>(l: usize) -> Complex<T> {
    let (o, z) = (T::one(), T::zero());
    match l % 4 {
        0 => Complex::new(o, z),
        1 => Complex::new(z, -o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, o),
    }
}

/// `φ_{n,l,m}(v)`.
pub fn eval_phi<T: Real>(mode: ModeIndex, v: [T; 3]) -> Complex<T> {
    let (r, cos_t, phi) = polar(v);
    let x = r * r * T::lit(0.5);
    let alpha = T::from_usize_lossy(mode.l) + T::lit(0.5);
    let radial = ln_radial_norm::<T>(mode.n, mode.l).exp()
        * (r / T::SQRT_2()).powi(mode.l as i32)
        * (-x * T::lit(0.5)).exp()
        * laguerre_unchecked(mode.n, alpha, x);
    spherical_harmonic_cos(mode.l, mode.m, cos_t, phi) * radial
}

/// Closed-form Fourier transform of `√μ φ_{n,l,m}`:
/// `(-i)^l (2π)^{3/4} (√2 n! Γ(n+l+3/2))^{-1/2} (|ξ|/√2)^{2n+l} e^{-|ξ|²/2} Y_l^m(ξ/|ξ|)`.
pub fn fourier_sqrtmu_phi<T: Real>(mode: ModeIndex, xi: [T; 3]) -> Complex<T> {
    let (r, cos_t, phi) = polar(xi);
    let nl = T::from_usize_lossy(mode.n + mode.l);
    let ln_c = T::lit(0.75) * (T::TAU()).ln()
        - T::lit(0.5) * (T::lit(0.5) * T::LN_2() + ln_factorial::<T>(mode.n) + ln_gamma(nl + T::lit(1.5)));
    let radial = ln_c.exp() * (r / T::SQRT_2()).powi(mode.degree() as i32) * (-r * r * T::lit(0.5)).exp();
    minus_i_pow::<T>(mode.l) * spherical_harmonic_cos(mode.l, mode.m, cos_t, phi) * radial
}

/// Smallest resolution at which [`inner_product_numeric`] is exact for the pair.
pub fn minimal_resolution(a: ModeIndex, b: ModeIndex) -> usize {
    let ls = a.l + b.l;
    // radial polynomial degree after pulling out the weight x^{1/2} e^{-x}
    let radial_degree = ls.div_ceil(2) + a.n + b.n;
    let radial = radial_degree / 2 + 1;
    let polar_nodes = (ls + 2) / 2;
    let azimuth = (a.m - b.m).unsigned_abs() as usize / 2 + 1;
    radial.max(polar_nodes).max(azimuth)
}

struct ProductRule<T> {
    radial_x: Vec<T>,
    radial_w: Vec<T>,
    polar_u: Vec<T>,
    polar_w: Vec<T>,
    azimuth: Vec<T>,
}

impl<T: Real> ProductRule<T> {
    fn new(resolution: usize) -> Self {
        let lag = gauss_laguerre::<T>(resolution, T::lit(0.5));
        let leg = gauss_legendre::<T>(resolution);
        let nphi = 2 * resolution;
        Self {
            radial_x: lag.nodes,
            radial_w: lag.weights,
            polar_u: leg.nodes,
            polar_w: leg.weights,
            azimuth: (0..nphi).map(|j| T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(nphi)).collect(),
        }
    }

    /// `∫_0^∞ R_a R_b r² dr` in `x = r²/2`.
    fn radial(&self, na: usize, la: usize, nb: usize, lb: usize) -> T {
        let ln_c = ln_radial_norm::<T>(na, la) + ln_radial_norm::<T>(nb, lb);
        let half = T::lit(0.5);
        let (aa, ab) = (T::from_usize_lossy(la) + half, T::from_usize_lossy(lb) + half);
        let pow = T::from_usize_lossy(la + lb) * half;
        let mut acc = CompensatedSum::new();
        for (&x, &w) in self.radial_x.iter().zip(&self.radial_w) {
            acc.add(w * x.powf(pow) * laguerre_unchecked(na, aa, x) * laguerre_unchecked(nb, ab, x));
        }
        T::SQRT_2() * ln_c.exp() * acc.value()
    }

    /// `∫_{S²} Y_a conj(Y_b) dσ`.
    fn angular(&self, la: usize, ma: i64, lb: usize, mb: i64) -> Complex<T> {
        let dphi = T::TAU() / T::from_usize_lossy(self.azimuth.len());
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (&u, &w) in self.polar_u.iter().zip(&self.polar_w) {
            for &phi in &self.azimuth {
                let p = spherical_harmonic_cos(la, ma, u, phi) * spherical_harmonic_cos(lb, mb, u, phi).conj();
                re.add(w * dphi * p.re);
                im.add(w * dphi * p.im);
            }
        }
        Complex::new(re.value(), im.value())
    }
}

/// `⟨φ_a, φ_b⟩_{L²(ℝ³)}` by a product rule: generalized Gauss–Laguerre
/// (`α = 1/2`) in `|v|²/2`, Gauss–Legendre in `cos θ`, trapezoid in `φ`,
/// each with `resolution` nodes (twice that in `φ`).
///
/// The rule is exact for the pair once `resolution ≥ minimal_resolution(a, b)`;
/// below that an [`Error::Resolution`] is returned instead of a guess.
pub fn inner_product_numeric<T: Real>(a: ModeIndex, b: ModeIndex, resolution: usize) -> Result<Complex<T>> {
    let needed = minimal_resolution(a, b);
    if resolution < needed {
        return Err(Error::Resolution {
            given: resolution,
            needed,
        });
    }
    let rule = ProductRule::<T>::new(resolution);
    Ok(rule.angular(a.l, a.m, b.l, b.m) * rule.radial(a.n, a.l, b.n, b.l))
}

/// `max |⟨φ_a, φ_b⟩ - δ_{ab}|` over all modes with `n ≤ nmax`, `l ≤ lmax`,
/// using the rule of [`inner_product_numeric`] with radial and angular
/// factors tabulated once.
pub fn gram_max_deviation<T: Real>(nmax: usize, lmax: usize, resolution: usize) -> Result<T> {
    let corner = ModeIndex {
        n: nmax,
        l: lmax,
        m: lmax as i64,
    };
    let needed = minimal_resolution(corner, ModeIndex { m: -corner.m, ..corner });
    if resolution < needed {
        return Err(Error::Resolution {
            given: resolution,
            needed,
        });
    }
    let rule = ProductRule::<T>::new(resolution);
    let nl: Vec<(usize, usize)> = (0..=nmax).flat_map(|n| (0..=lmax).map(move |l| (n, l))).collect();
    let lm: Vec<(usize, i64)> = (0..=lmax).flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m))).collect();
    let radial: Vec<Vec<T>> = nl
        .iter()
        .map(|&(na, la)| nl.iter().map(|&(nb, lb)| rule.radial(na, la, nb, lb)).collect())
        .collect();
    let angular: Vec<Vec<Complex<T>>> = lm
        .iter()
        .map(|&(la, ma)| lm.iter().map(|&(lb, mb)| rule.angular(la, ma, lb, mb)).collect())
        .collect();
    let mut worst = T::zero();
    for (i, &(na, la)) in nl.iter().enumerate() {
        for (j, &(nb, lb)) in nl.iter().enumerate() {
            for (p, &(l1, ma)) in lm.iter().enumerate() {
                if l1 != la {
                    continue;
                }
                for (q, &(l2, mb)) in lm.iter().enumerate() {
                    if l2 != lb {
                        continue;
                    }
                    let delta = if (na, la, ma) == (nb, lb, mb) { T::one() } else { T::zero() };
                    worst = worst.max((angular[p][q] * radial[i][j] - delta).norm());
                }
            }
        }
    }
    Ok(worst)
}

const STENCIL: [f64; 4] = [-49.0 / 18.0, 1.5, -3.0 / 20.0, 1.0 / 90.0];

/// `max_v |(-Δ + |v|²/4) φ - (2n+l+3/2) φ| / max(1, |φ|)` over the points,
/// with the Laplacian from sixth-order central differences at step `10^{-2}`.
///
/// Meant for double precision; points near the origin should be avoided when `l > 0`.
pub fn oscillator_residual<T: Real>(mode: ModeIndex, points: &[[T; 3]]) -> T {
    let h = T::lit(1e-2);
    let energy = T::from_usize_lossy(mode.degree()) + T::lit(1.5);
    let mut worst = T::zero();
    for &v in points {
        let centre = eval_phi(mode, v);
        let mut lap = centre * T::lit(3.0 * STENCIL[0]);
        for axis in 0..3 {
            for (k, &c) in STENCIL.iter().enumerate().skip(1) {
                let mut plus = v;
                let mut minus = v;
                plus[axis] += h * T::from_usize_lossy(k);
                minus[axis] -= h * T::from_usize_lossy(k);
                lap += (eval_phi(mode, plus) + eval_phi(mode, minus)) * T::lit(c);
            }
        }
        lap /= h * h;
        let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let res = -lap + centre * (r2 * T::lit(0.25)) - centre * energy;
        worst = worst.max(res.norm() / centre.norm().max(T::one()));
    }
    worst
}

/// `count` reproducible points with uniform direction and radius uniform in `[r_min, r_max]`.
pub fn sample_shell_points<T: Real>(count: usize, seed: u64, r_min: f64, r_max: f64) -> Vec<[T; 3]> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r: f64 = rng.gen_range(r_min..=r_max);
            let s = (1.0 - z * z).sqrt();
            [T::lit(r * z), T::lit(r * s * phi.cos()), T::lit(r * s * phi.sin())]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_hermite;

    fn mode(n: usize, l: usize, m: i64) -> ModeIndex {
        ModeIndex::new(n, l, m).unwrap()
    }

    #[test]
    fn phi_spot_values() {
        let g = (2.0 * std::f64::consts::PI).powf(-0.75);
        assert!((eval_phi(mode(0, 0, 0), [0.0, 0.0, 0.0]).re - g).abs() < 1e-15);
        assert_eq!(eval_phi(mode(0, 1, 0), [0.0, 0.0, 0.0]).norm(), 0.0);
        // c_{1,0} = (1/(√2 Γ(5/2)))^{1/2}, Γ(5/2) = 3√π/4, L_1^{(1/2)}(1/2) = 1
        let c10 = (1.0 / (2f64.sqrt() * 0.75 * std::f64::consts::PI.sqrt())).sqrt();
        let expect = c10 * (-0.25f64).exp() / (4.0 * std::f64::consts::PI).sqrt();
        assert!((eval_phi(mode(1, 0, 0), [1.0, 0.0, 0.0]).re - expect).abs() < 1e-15);
    }

    #[test]
    fn ground_state_is_sqrt_maxwellian() {
        for i in 0..20 {
            for j in 0..5 {
                let v = [0.3 * i as f64 - 3.0, 0.5 * j as f64, -0.2 * i as f64];
                let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
                let sqrt_mu = (2.0 * std::f64::consts::PI).powf(-0.75) * (-r2 / 4.0).exp();
                assert!((eval_phi(mode(0, 0, 0), v).re - sqrt_mu).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fourier_spot_values() {
        assert!((fourier_sqrtmu_phi(mode(0, 0, 0), [0.0f64, 0.0, 0.0]).re - 1.0).abs() < 1e-12);
        let v = fourier_sqrtmu_phi(mode(0, 0, 0), [0.0, 0.6, 0.8]);
        assert!((v.re - (-0.5f64).exp()).abs() < 1e-14 && v.im.abs() < 1e-15);
        // (0,1,0) along the polar axis: -i (2π)^{3/4} (√2 Γ(5/2))^{-1/2} (t/√2) e^{-t²/2} Y_1^0
        let t = 1.0f64;
        let y10 = (3.0 / (4.0 * std::f64::consts::PI)).sqrt();
        let amp = std::f64::consts::TAU.powf(0.75) * (2f64.sqrt() * 0.75 * std::f64::consts::PI.sqrt()).powf(-0.5)
            * (t / 2f64.sqrt())
            * (-t * t / 2.0).exp()
            * y10;
        let got = fourier_sqrtmu_phi(mode(0, 1, 0), [t, 0.0, 0.0]);
        assert!(got.re.abs() < 1e-15 && (got.im + amp).abs() < 1e-14);
        // orthogonal to the polar axis Y_1^0 vanishes
        assert!(fourier_sqrtmu_phi(mode(0, 1, 0), [0.0, 0.0, t]).norm() < 1e-15);
    }

    /// `∫ e^{-iv·ξ} √μ(v) φ(v) dv` by tensor Gauss–Hermite in `v = √2 y`.
    fn fourier_by_quadrature(m: ModeIndex, xi: [f64; 3], nodes: usize) -> Complex<f64> {
        let gh = gauss_hermite::<f64>(nodes);
        let s2 = 2f64.sqrt();
        let pts: Vec<(f64, f64)> = gh.nodes.iter().copied().zip(gh.weights.iter().copied()).collect();
        let mut acc = Complex::new(0.0, 0.0);
        for &(y1, w1) in &pts {
            for &(y2, w2) in &pts {
                for &(y3, w3) in &pts {
                    let v = [s2 * y1, s2 * y2, s2 * y3];
                    // √μ φ e^{-i v·ξ} = (2π)^{-3/4} e^{-|v|²/4} φ e^{-iv·ξ}; e^{-|y|²} is in the weights
                    let r2 = y1 * y1 + y2 * y2 + y3 * y3;
                    let g = (2.0 * std::f64::consts::PI).powf(-0.75) * (r2 / 2.0).exp();
                    let phase = -(v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2]);
                    acc += eval_phi(m, v) * Complex::from_polar(g * w1 * w2 * w3 * s2.powi(3), phase);
                }
            }
        }
        acc
    }

    #[test]
    fn fourier_matches_quadrature() {
        let xis = [[0.3, -0.2, 0.5], [1.0, 0.0, 0.0], [-0.4, 0.9, 0.1]];
        for m in [mode(0, 0, 0), mode(1, 1, -1), mode(2, 3, 2), mode(0, 2, 1)] {
            for xi in xis {
                let closed = fourier_sqrtmu_phi(m, xi);
                let quad = fourier_by_quadrature(m, xi, 24);
                assert!((closed - quad).norm() < 1e-6, "{m} {xi:?}: {closed} vs {quad}");
            }
        }
    }

    #[test]
    fn inner_product_examples() {
        let one: Complex<f64> = inner_product_numeric(mode(0, 0, 0), mode(0, 0, 0), 4).unwrap();
        assert!((one.re - 1.0).abs() < 1e-12 && one.im.abs() < 1e-14);
        let z: Complex<f64> = inner_product_numeric(mode(0, 1, 0), mode(0, 1, 1), 4).unwrap();
        assert!(z.norm() < 1e-14);
        let z: Complex<f64> = inner_product_numeric(mode(3, 2, 1), mode(1, 2, 1), 8).unwrap();
        assert!(z.norm() < 1e-12);
        let need = minimal_resolution(mode(3, 2, 1), mode(1, 2, 1));
        assert!(matches!(
            inner_product_numeric::<f64>(mode(3, 2, 1), mode(1, 2, 1), need - 1),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn gram_matrix_small_block() {
        let dev: f64 = gram_max_deviation(3, 3, 12).unwrap();
        assert!(dev < 1e-12, "{dev}");
        assert!(gram_max_deviation::<f64>(10, 10, 5).is_err());
    }

    #[test]
    fn oscillator_relation() {
        let pts = sample_shell_points::<f64>(30, 5, 0.5, 4.0);
        for m in [mode(0, 0, 0), mode(1, 0, 0), mode(2, 3, 1)] {
            let r = oscillator_residual(m, &pts);
            assert!(r < 1e-6, "{m}: {r}");
        }
        assert_eq!(pts, sample_shell_points::<f64>(30, 5, 0.5, 4.0));
    }
}
