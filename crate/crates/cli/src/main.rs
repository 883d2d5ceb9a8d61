use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use yukawa_core::basis::SpectralField;
use yukawa_core::kernel::{
    asymptotic_leading, eigenvalue_table, load_cache, log_bound, save_cache, EigenvalueTable, KernelParams,
    QuadratureSpec,
};
use yukawa_core::solver::{
    evolution_report, fit_gamma, InitialDataSpec, TailClassifier, DEFAULT_SERIES_N, DEFAULT_WINDOW, INIT_FORMS,
};
use yukawa_core::spaces::{NormSpec, CANONICAL_FORMS};
use yukawa_core::verify::{self, Suite, SUITES};
use yukawa_core::Error;

#[derive(Parser)]
#[command(name = "yukawa", version, about = "Spectral solver for the linearized Boltzmann operator with a Debye-Yukawa kernel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate eigenvalues with ratio and asymptotic columns.
    Eigs(Common),
    /// Evolve initial data exactly and report norms over time.
    Evolve(EvolveArgs),
    /// Run a verification suite and write a JSON report.
    Verify(VerifyArgs),
    /// Sweep the series tail classifier for one of the delay scenarios.
    Scenario(ScenarioArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Kernel exponent s > 0 (defaults to 2, or the scenario's own value).
    #[arg(long)]
    s: Option<f64>,
    #[arg(long, default_value_t = 20)]
    nmax: usize,
    #[arg(long, default_value_t = 20)]
    lmax: usize,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-14)]
    abs_tol: f64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Eigenvalue cache directory; omit to disable caching.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: Common,
    /// Initial data: a series keyword, inline modes, or file:PATH with a field in JSON.
    #[arg(long, long_help = format!("Initial data, one of: {INIT_FORMS} | file:PATH"))]
    init: String,
    /// Comma-separated times, strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    times: Vec<f64>,
    /// Semicolon-separated norm specs.
    #[arg(long, value_delimiter = ';', default_value = "l2", long_help = format!("Semicolon-separated norms, each one of: {CANONICAL_FORMS}"))]
    norms: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "all", long_help = format!("One of: {SUITES}"))]
    suite: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scenario {
    Remark14,
    Example41,
    Example42,
}

#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    scenario: Scenario,
    /// Comma-separated t-grid; each scenario has its own default.
    #[arg(long, value_delimiter = ',')]
    times: Vec<f64>,
    /// Comma-separated Shubin orders for example41.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    ks: Vec<f64>,
    /// Delay exponent for remark14.
    #[arg(long, default_value_t = 0.5)]
    tau0: f64,
    /// Regularity of the example42 data; the failing norm is Shubin(tau-prime).
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 2.0)]
    tau_prime: f64,
    /// Series truncation N.
    #[arg(long, default_value_t = DEFAULT_SERIES_N)]
    series_n: usize,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,
}

enum Failure {
    Usage(String),
    Verify,
    Numeric(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Parse(_) | Error::Cache(_) => Failure::Usage(e.to_string()),
            Error::Convergence { .. } | Error::Resolution { .. } => Failure::Numeric(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eigs(c) => cmd_eigs(&c),
        Command::Evolve(a) => cmd_evolve(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Scenario(a) => cmd_scenario(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn config(c: &Common, default_s: f64) -> Outcome<(KernelParams<f64>, QuadratureSpec<f64>)> {
    let params = KernelParams::new(c.s.unwrap_or(default_s))?;
    let defaults = QuadratureSpec::<f64>::default();
    let quad = QuadratureSpec::new(c.rel_tol, c.abs_tol, defaults.max_panels, defaults.nodes_per_panel)?;
    Ok((params, quad))
}

/// The table for `n ≤ nmax, l ≤ lmax`, from the cache when it already covers
/// the range. A miss computes the range and stores it merged with whatever the
/// cache held.
fn table(
    c: &Common,
    params: &KernelParams<f64>,
    quad: &QuadratureSpec<f64>,
    nmax: usize,
    lmax: usize,
) -> Outcome<EigenvalueTable<f64>> {
    let cached = match &c.cache_dir {
        Some(dir) => load_cache(dir, params, quad)?,
        None => None,
    };
    if let Some(t) = cached.as_ref().filter(|t| t.covers(nmax, lmax)) {
        return Ok(t.restrict(nmax, lmax));
    }
    let fresh = eigenvalue_table(nmax, lmax, params, quad)?;
    if let Some(dir) = &c.cache_dir {
        let mut all: BTreeMap<(usize, usize), _> = BTreeMap::new();
        for e in cached.iter().flat_map(|t| t.entries()).chain(fresh.entries()) {
            all.insert((e.n, e.l), *e);
        }
        save_cache(dir, &EigenvalueTable::from_entries(*params, *quad, all.into_values())?)?;
    }
    Ok(fresh)
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Outcome<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, &path)?;
    println!("{}", path.display());
    Ok(path)
}

fn render<R: Serialize>(rows: &[R], format: Format) -> Outcome<String> {
    match format {
        Format::Json => serde_json::to_string_pretty(rows).map(|s| s + "\n").map_err(|e| Failure::Other(e.to_string())),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| Failure::Other(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Other(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Failure::Other(e.to_string()))
        }
    }
}

fn tag(x: f64) -> String {
    format!("{x}").replace('.', "p")
}

#[derive(Serialize)]
struct EigRow {
    n: usize,
    l: usize,
    lambda: f64,
    err: f64,
    ratio_to_log_bound: f64,
    asymptotic_leading: Option<f64>,
}

fn cmd_eigs(c: &Common) -> Outcome<()> {
    let (params, quad) = config(c, 2.0)?;
    let t = table(c, &params, &quad, c.nmax, c.lmax)?;
    let rows: Vec<EigRow> = t
        .entries()
        .map(|e| EigRow {
            n: e.n,
            l: e.l,
            lambda: e.lambda,
            err: e.err_estimate,
            ratio_to_log_bound: e.lambda / log_bound(e.n, e.l, params.s()),
            asymptotic_leading: asymptotic_leading(e.n, e.l, &params).ok(),
        })
        .collect();
    let name = format!("eigs-s{}-n{}-l{}.{}", tag(params.s()), c.nmax, c.lmax, c.format.ext());
    write_output(&c.out, &name, &render(&rows, c.format)?)?;
    Ok(())
}

fn load_init(text: &str) -> Outcome<InitialDataSpec<f64>> {
    if let Some(path) = text.strip_prefix("file:") {
        let json = fs::read_to_string(path)?;
        return Ok(InitialDataSpec::FiniteModes(SpectralField::from_json(&json)?));
    }
    Ok(text.parse()?)
}

fn cmd_evolve(a: &EvolveArgs) -> Outcome<()> {
    let c = &a.common;
    let (params, quad) = config(c, 2.0)?;
    let init = load_init(&a.init)?;
    let norms = a
        .norms
        .iter()
        .map(|s| s.parse::<NormSpec<f64>>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let (nmax, lmax) = match &init {
        InitialDataSpec::FiniteModes(f) => f.modes().fold((2, 0), |(n, l), k| (n.max(k.n), l.max(k.l))),
        other => (other.n_max().unwrap_or(2), 0),
    };
    let t = table(c, &params, &quad, nmax, lmax)?;
    let g0 = init.materialize(&t)?;
    let report = evolution_report(&g0, &a.times, &norms, &t)?;
    let body = match c.format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()? + "\n",
    };
    write_output(&c.out, &format!("evolve.{}", c.format.ext()), &body)?;
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Outcome<()> {
    let c = &a.common;
    let suite: Suite = a.suite.parse()?;
    let (params, quad) = config(c, 2.0)?;
    let report = verify::run(suite, params.s(), &quad)?;
    for chk in &report.checks {
        println!(
            "{} {}/{}: measured {:e}, threshold {:e}",
            if chk.passed { "PASS" } else { "FAIL" },
            chk.suite,
            chk.name,
            chk.measured,
            chk.threshold
        );
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Other(e.to_string()))? + "\n";
    write_output(&c.out, &format!("verify-{suite}.json"), &json)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

#[derive(Serialize)]
struct VerdictRow {
    scenario: &'static str,
    k: Option<f64>,
    t: f64,
    norm: String,
    verdict: String,
    window_growth: f64,
    kappa: Option<f64>,
    tail_bound: Option<f64>,
}

#[derive(Serialize)]
struct FrontierRow {
    k: f64,
    t_star: f64,
    gamma: f64,
    k_over_two_gamma: f64,
}

fn cmd_scenario(a: &ScenarioArgs) -> Outcome<()> {
    let c = &a.common;
    let (name, default_s, default_times): (&'static str, f64, &[f64]) = match a.scenario {
        Scenario::Remark14 => ("remark14", 1.0, &[0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 1.0]),
        Scenario::Example41 => ("example41", 2.0, &[0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0]),
        Scenario::Example42 => ("example42", 4.0, &[0.5, 1.0, 2.0, 5.0, 10.0]),
    };
    let (params, quad) = config(c, default_s)?;
    let times = if a.times.is_empty() { default_times.to_vec() } else { a.times.clone() };
    let n = a.series_n;
    let t = table(c, &params, &quad, n, 0)?;
    let classifier = TailClassifier::new(n, &params, &quad)?;
    let mut rows = Vec::new();
    let mut sweep = |spec: &InitialDataSpec<f64>, norm: NormSpec<f64>, k: Option<f64>| -> Outcome<()> {
        for &time in &times {
            let v = classifier.classify(spec, time, &norm, &t, a.window)?;
            rows.push(VerdictRow {
                scenario: name,
                k,
                t: time,
                norm: norm.to_string(),
                verdict: v.classification.to_string(),
                window_growth: v.evidence.window_growth,
                kappa: v.evidence.kappa,
                tail_bound: v.evidence.tail_bound,
            });
        }
        Ok(())
    };
    let mut frontier = Vec::new();
    match a.scenario {
        Scenario::Remark14 => {
            sweep(&InitialDataSpec::DelaySeries { tau0: a.tau0, n_max: n }, NormSpec::L2, None)?;
        }
        Scenario::Example42 => {
            let spec = InitialDataSpec::SobolevSeries { tau: a.tau, n_max: n };
            sweep(&spec, NormSpec::Shubin { k: a.tau }, Some(a.tau))?;
            sweep(&spec, NormSpec::Shubin { k: a.tau_prime }, Some(a.tau_prime))?;
        }
        Scenario::Example41 => {
            let spec = InitialDataSpec::S2DelaySeries { n_max: n };
            for &k in &a.ks {
                sweep(&spec, NormSpec::Shubin { k }, Some(k))?;
            }
            let gamma = fit_gamma(&t, (n / 10).max(2), n)?;
            for &k in &a.ks {
                let guess = k / (2.0 * gamma);
                let t_star = classifier.frontier(&spec, &NormSpec::Shubin { k }, &t, a.window, (0.0, 4.0 * guess + 1.0), 40)?;
                frontier.push(FrontierRow {
                    k,
                    t_star,
                    gamma,
                    k_over_two_gamma: guess,
                });
            }
        }
    }
    let ext = c.format.ext();
    write_output(&c.out, &format!("scenario-{name}.{ext}"), &render(&rows, c.format)?)?;
    if !frontier.is_empty() {
        write_output(&c.out, &format!("scenario-{name}-frontier.{ext}"), &render(&frontier, c.format)?)?;
    }
    Ok(())
}
