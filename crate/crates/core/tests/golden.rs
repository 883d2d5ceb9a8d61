//! Frozen eigenvalues from an independent brute-force quadrature.

use serde::Deserialize;
use yukawa_core::kernel::{eigenvalue, KernelParams, QuadratureSpec};
use yukawa_core::scalar::CompensatedSum;

#[derive(Deserialize)]
struct Golden {
    s: f64,
    n: usize,
    l: usize,
    lambda: f64,
}

fn golden() -> Vec<Golden> {
    serde_json::from_str(include_str!("golden/eigenvalues.json")).unwrap()
}

fn legendre_small(l: usize, x: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => x,
        2 => 0.5 * (3.0 * x * x - 1.0),
        3 => 0.5 * (5.0 * x.powi(3) - 3.0 * x),
        _ => unimplemented!("oracle covers l <= 3"),
    }
}

/// Composite Simpson in `y = -ln θ` on `[-ln(π/4), 30]` with the direct
/// bracket `1 - cos^k P_l(cos) - sin^k P_l(sin)`; in `y` the integrand is
/// smooth and decays like `e^{-2y}`.
fn simpson_oracle(n: usize, l: usize, s: f64) -> f64 {
    let k = (2 * n + l) as i32;
    let p = 2.0 / s - 1.0;
    let f = |y: f64| {
        let th = (-y).exp();
        let (sn, cs) = th.sin_cos();
        let bracket = if l == 0 && n == 2 {
            // 1 - cos⁴ - sin⁴ without cancellation
            0.5 * (2.0 * th).sin().powi(2)
        } else {
            1.0 - cs.powi(k) * legendre_small(l, cs) - sn.powi(k) * legendre_small(l, sn)
        };
        (-sn.ln()).powf(p) / sn * bracket * th
    };
    let (a, b) = (-std::f64::consts::FRAC_PI_4.ln(), 30.0);
    let m = 400_000;
    let h = (b - a) / m as f64;
    let mut acc = CompensatedSum::new();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(a + h * i as f64));
    }
    acc.value() * h / 3.0
}

#[test]
fn oracle_reproduces_the_frozen_values() {
    for g in golden() {
        let o = simpson_oracle(g.n, g.l, g.s);
        assert!((o - g.lambda).abs() <= 1e-10 * g.lambda, "s={} ({},{}): {o} vs {}", g.s, g.n, g.l, g.lambda);
    }
}

#[test]
fn engine_matches_the_frozen_values() {
    let q = QuadratureSpec::default();
    for g in golden() {
        let e = eigenvalue(g.n, g.l, &KernelParams::new(g.s).unwrap(), &q).unwrap();
        assert!((e.lambda - g.lambda).abs() <= 1e-9 * g.lambda, "s={} ({},{}): {} vs {}", g.s, g.n, g.l, e.lambda, g.lambda);
    }
}

#[test]
fn closed_forms_at_s_two() {
    let r = 2f64.powf(-1.5);
    let q = QuadratureSpec::default();
    let p = KernelParams::new(2.0).unwrap();
    assert!((eigenvalue(2, 0, &p, &q).unwrap().lambda - 2.0 / 3.0 * (1.0 - r)).abs() < 1e-12);
    assert!((eigenvalue(0, 2, &p, &q).unwrap().lambda - (1.0 - r)).abs() < 1e-12);
}

#[test]
#[ignore = "prints oracle values for refreezing"]
fn print_oracle() {
    for (s, n, l) in [(0.5, 2, 0), (1.0, 2, 0), (2.0, 2, 0), (4.0, 2, 0), (2.0, 0, 2), (1.0, 1, 1), (1.0, 0, 3), (4.0, 1, 2)] {
        println!("{{\"s\": {s}, \"n\": {n}, \"l\": {l}, \"lambda\": {:?}}},", simpson_oracle(n, l, s));
    }
}
