//! Quick self-checks grouped by module, reported as JSON.
//!
//! These are small versions of the acceptance criteria, sized to run in a few
//! seconds from the command line.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::basis::{
    fourier_sqrtmu_phi, gram_max_deviation, oscillator_residual, sample_shell_points, ModeIndex, SpectralField,
};
use crate::error::{Error, Result};
use crate::kernel::{
    eigenvalue, eigenvalue_table, gap_violations, ratio_bounds, KernelParams, QuadratureSpec,
};
use crate::solver::{
    c0_rate1, evolve, rate1_modewise_worst, series_tail_classify, weak_form_residual, InitialDataSpec, Verdict,
};
use crate::spaces::{young_log_rhs, young_min, NormSpec};
use crate::specfun::{legendre, legendre_scaled_gap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Specfun,
    Kernel,
    Basis,
    Spaces,
    Solver,
    All,
}

pub const SUITES: &str = "specfun | kernel | basis | spaces | solver | all";

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "specfun" => Suite::Specfun,
            "kernel" => Suite::Kernel,
            "basis" => Suite::Basis,
            "spaces" => Suite::Spaces,
            "solver" => Suite::Solver,
            "all" => Suite::All,
            other => return Err(Error::Parse(format!("unknown suite `{other}`; expected one of: {SUITES}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        f.write_str(&name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub s: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

struct Recorder {
    suite: Suite,
    checks: Vec<Check>,
}

impl Recorder {
    fn at_most(&mut self, name: &str, measured: f64, threshold: f64) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.to_string(),
            measured,
            threshold,
            passed: measured <= threshold,
        });
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.at_most(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

/// Runs the selected checks for kernel exponent `s`.
///
/// Numerical failures inside a check are reported as errors, not as failed
/// checks.
pub fn run(suite: Suite, s: f64, quad: &QuadratureSpec<f64>) -> Result<VerifyReport> {
    let params = KernelParams::new(s)?;
    let order = [Suite::Specfun, Suite::Kernel, Suite::Basis, Suite::Spaces, Suite::Solver];
    let mut checks = Vec::new();
    for part in order.into_iter().filter(|p| suite == Suite::All || suite == *p) {
        let mut rec = Recorder {
            suite: part,
            checks: Vec::new(),
        };
        match part {
            Suite::Specfun => specfun_checks(&mut rec)?,
            Suite::Kernel => kernel_checks(&mut rec, &params, quad)?,
            Suite::Basis => basis_checks(&mut rec)?,
            Suite::Spaces => spaces_checks(&mut rec)?,
            Suite::Solver => solver_checks(&mut rec, &params, quad)?,
            Suite::All => unreachable!(),
        }
        checks.extend(rec.checks);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        suite,
        s,
        checks,
        passed,
    })
}

fn specfun_checks(rec: &mut Recorder) -> Result<()> {
    let mut bound = 0.0f64;
    for l in 0..=2000 {
        for i in 0..=64 {
            bound = bound.max(legendre(l, -1.0 + i as f64 / 32.0)?.abs());
        }
    }
    rec.at_most("legendre_bounded_by_one", bound, 1.0 + 1e-12);
    let x: f64 = 0.3;
    let p3 = 0.5 * (5.0 * x.powi(3) - 3.0 * x);
    rec.at_most("legendre_p3_closed_form", (legendre(3, x)? - p3).abs(), 1e-15);
    let half = std::f64::consts::FRAC_PI_2;
    let l1 = legendre_scaled_gap(1, half)?;
    rec.at_most("grazing_quotient_l1_at_half_pi", (l1 - 1.0 / (half * half)).abs(), 1e-9);
    let mut sup_high = 0.0f64;
    for l in 100..=500usize {
        for i in 1..=1000 {
            sup_high = sup_high.max(legendre_scaled_gap(l, half * i as f64 / 1000.0)?);
        }
    }
    rec.at_most("grazing_quotient_high_degree_sup", sup_high, 0.28);
    Ok(())
}

fn kernel_checks(rec: &mut Recorder, params: &KernelParams<f64>, quad: &QuadratureSpec<f64>) -> Result<()> {
    let null = [(0, 0), (1, 0), (0, 1)]
        .iter()
        .map(|&(n, l)| crate::kernel::eigenvalue_forced(n, l, params, quad).map(|e| e.lambda.abs()))
        .collect::<Result<Vec<_>>>()?;
    rec.at_most("null_modes_vanish", null.into_iter().fold(0.0, f64::max), 1e-12);
    let gap = eigenvalue(2, 0, params, quad)?;
    if params.s() == 2.0 {
        let exact = (2.0 / 3.0) * (1.0 - 2f64.powf(-1.5));
        rec.at_most("gap_closed_form", (gap.lambda - exact).abs(), 1e-8);
    } else {
        let tight = QuadratureSpec::new(quad.rel_tol * 1e-2, quad.abs_tol * 1e-2, quad.max_panels, quad.nodes_per_panel)?;
        let fine = eigenvalue(2, 0, params, &tight)?;
        rec.at_most("gap_stable_under_refinement", (gap.lambda - fine.lambda).abs() / fine.lambda, 1e-7);
    }
    let table = eigenvalue_table(40, 40, params, quad)?;
    rec.at_most("gap_violations", gap_violations(&table)?.len() as f64, 0.0);
    let rb = ratio_bounds(&table)?;
    rec.at_most("ratio_spread", rb.c_max / rb.c_min, 50.0);
    rec.flag("ratio_lower_bound_positive", rb.c_min > 0.0);
    Ok(())
}

fn basis_checks(rec: &mut Recorder) -> Result<()> {
    rec.at_most("gram_deviation", gram_max_deviation::<f64>(6, 6, 16)?, 1e-8);
    let pts = sample_shell_points::<f64>(50, 7, 0.5, 3.0);
    let mut worst = 0.0f64;
    for n in 0..=3 {
        for l in 0..=3 {
            worst = worst.max(oscillator_residual(ModeIndex::new(n, l, (l as i64) / 2)?, &pts));
        }
    }
    rec.at_most("oscillator_residual", worst, 1e-6);
    let f0 = fourier_sqrtmu_phi::<f64>(ModeIndex::new(0, 0, 0)?, [0.0; 3]);
    rec.at_most("fourier_ground_state_at_origin", (f0 - Complex::new(1.0, 0.0)).norm(), 1e-12);
    Ok(())
}

fn spaces_checks(rec: &mut Recorder) -> Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let tau = rng.gen_range(0.2..3.0);
        let nu = rng.gen_range(0.2..1.8);
        let k = rng.gen_range(0.5..8.0);
        let m = young_min(tau, nu, k, f64::MAX)?;
        let rhs = young_log_rhs(tau, nu, k)?;
        worst = worst.max((m.log_min - rhs).abs() / rhs.abs().max(1.0));
    }
    rec.at_most("young_min_matches_closed_form", worst, 1e-6);
    let m = young_min(1.0, 1.0, 4.0, 1e6)?;
    rec.at_most("young_instance_e_minus_two", (m.min_value - (-2f64).exp()).abs() / (-2f64).exp(), 1e-6);
    Ok(())
}

fn solver_checks(rec: &mut Recorder, params: &KernelParams<f64>, quad: &QuadratureSpec<f64>) -> Result<()> {
    let table = eigenvalue_table(30, 15, params, quad)?;
    let gap = table.lambda(2, 0)?;
    let g = SpectralField::from_real("g", &[(2, 0, 0, 1.0)])?;
    let mut worst = 0.0f64;
    for t in [0.1, 1.0, 10.0] {
        let a = evolve(&g, t, &table)?.get(&ModeIndex::new(2, 0, 0)?).re;
        worst = worst.max((a / (-gap * t).exp() - 1.0).abs());
    }
    rec.at_most("exact_gap_decay", worst, 1e-12);
    let two_step = evolve(&evolve(&g, 0.4, &table)?, 0.6, &table)?.get(&ModeIndex::new(2, 0, 0)?).re;
    rec.at_most("semigroup", (two_step / evolve(&g, 1.0, &table)?.get(&ModeIndex::new(2, 0, 0)?).re - 1.0).abs(), 1e-12);
    let modes = [ModeIndex::new(2, 0, 0)?, ModeIndex::new(3, 2, 1)?, ModeIndex::new(0, 1, 0)?];
    let g3 = SpectralField::from_real("g3", &[(2, 0, 0, 1.0), (3, 2, 1, -0.5), (0, 1, 0, 0.25)])?;
    rec.at_most("weak_form_residual", weak_form_residual(&g3, &modes, 1.5, &table, 20)?, 1e-10);
    if params.s() <= 2.0 {
        let c0 = c0_rate1(ratio_bounds(&table)?.c_min, params.s());
        let worst = [0.5, 1.0, 2.0]
            .iter()
            .map(|&t| rate1_modewise_worst(&table, c0, t).map(|w| if w.holds { 0.0 } else { 1.0 }))
            .collect::<Result<Vec<_>>>()?;
        rec.at_most("rate1_modewise_certificate", worst.into_iter().fold(0.0, f64::max), 0.0);
    }
    let p1 = KernelParams::new(1.0)?;
    let t1 = eigenvalue_table(2000, 0, &p1, quad)?;
    let delay = InitialDataSpec::DelaySeries { tau0: 0.5, n_max: 2000 };
    let early = series_tail_classify(&delay, 0.1, &NormSpec::L2, &t1, 500)?.classification;
    let late = series_tail_classify(&delay, 1.0, &NormSpec::L2, &t1, 500)?.classification;
    rec.flag("delay_series_divergent_early", early == Verdict::Divergent);
    rec.flag("delay_series_convergent_late", late == Verdict::Convergent);
    Ok(())
}
