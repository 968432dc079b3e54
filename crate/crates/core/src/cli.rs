//! Command-line front end: argument parsing, curve files, JSON reports and SVG plots.
//!
//! Exit status is 0 on success, 1 for usage errors, 2 for domain and parse
//! errors, and 3 for resource, accounting and I/O failures.

use crate::account::{clt_compose, compose_gaussian, compose_tensor, dpsgd_account_with_cell, DpsgdMethod};
use crate::census::{census_compose, AllocationTable};
use crate::cnd::construct_cnd;
use crate::curve::{alpha_grid, Discretization, TradeoffCurve};
use crate::duality::{delta_at_eps, eps_at_delta};
use crate::error::{Error, Result};
use crate::mech::MechanismSpec;
use crate::oracle::{mc_tradeoff, renyi_counterexample_search};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

/// Environment variable naming a JSON file of default settings.
pub const CONFIG_ENV: &str = "FDP_CONFIG";

#[derive(Parser, Debug)]
#[command(name = "fdp", version, about = "Privacy accounting with trade-off functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the artifact to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Artifact format; each command has its own default.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Grid size used when a smooth curve is exported or plotted.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

/// Curve sources; every flag may be repeated.
#[derive(Args, Debug, Clone, Default)]
pub struct CurveArgs {
    /// Gaussian DP curve `G_mu`.
    #[arg(long = "gaussian", value_name = "MU")]
    pub gaussian: Vec<f64>,
    /// Pure DP curve `f_{eps,0}`.
    #[arg(long = "pure", value_name = "EPS")]
    pub pure: Vec<f64>,
    /// Mechanism description (JSON).
    #[arg(long = "mech", value_name = "FILE")]
    pub mech: Vec<PathBuf>,
    /// Curve file with header `alpha,beta`.
    #[arg(long = "curve", value_name = "FILE")]
    pub curve: Vec<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compose mechanisms and report certified (eps, delta) bounds.
    #[command(allow_negative_numbers = true)]
    Compose {
        #[command(flatten)]
        curves: CurveArgs,
        #[arg(long)]
        delta: Option<f64>,
        /// Lattice cell of the loss distributions.
        #[arg(long)]
        cell: Option<f64>,
        #[arg(long, value_enum, default_value_t = ComposeChoice::Fft)]
        method: ComposeChoice,
    },
    /// Convert one curve to (eps, delta) or Renyi guarantees.
    #[command(allow_negative_numbers = true)]
    Convert {
        #[command(flatten)]
        curves: CurveArgs,
        #[arg(long)]
        eps: Vec<f64>,
        #[arg(long)]
        delta: Vec<f64>,
        #[arg(long)]
        gamma: Vec<f64>,
    },
    /// Account for noisy SGD with Poisson subsampling.
    #[command(allow_negative_numbers = true)]
    Dpsgd {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        p: f64,
        /// Number of iterations.
        #[arg(long = "T")]
        steps: u64,
        #[arg(long, value_enum, default_value_t = DpsgdChoice::Gdp)]
        method: DpsgdChoice,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        cell: Option<f64>,
    },
    /// Curve of a mechanism description, typically a mixture.
    #[command(allow_negative_numbers = true)]
    Mixture {
        /// Mechanism description (JSON).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Compose the discrete Gaussian queries of an allocation table.
    #[command(allow_negative_numbers = true)]
    Census {
        /// Allocation file with header `level,query,sigma`.
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        cell: Option<f64>,
    },
    /// Build and validate the canonical noise distribution of a symmetric curve.
    #[command(allow_negative_numbers = true)]
    Cnd {
        #[command(flatten)]
        curves: CurveArgs,
        /// Draw this many noise samples.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Independent checks: Monte Carlo coverage, the Renyi counterexample, curve validity.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(value_enum)]
        check: VerifyCheck,
        #[command(flatten)]
        curves: CurveArgs,
        /// Monte Carlo sample size.
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        eps: Vec<f64>,
        #[arg(long)]
        gamma: Vec<f64>,
    },
    /// Draw curves against the identity diagonal.
    #[command(allow_negative_numbers = true)]
    Plot {
        #[command(flatten)]
        curves: CurveArgs,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComposeChoice {
    ClosedForm,
    Fft,
    Clt,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpsgdChoice {
    Gdp,
    Edgeworth,
    Fft,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyCheck {
    Mc,
    Renyi,
    Curve,
}

/// Defaults, overridable through the file named by [`CONFIG_ENV`].
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Defaults {
    pub grid: usize,
    pub cell: f64,
    pub delta: f64,
}

impl Default for Defaults {
    fn default() -> Self {
        Self { grid: 10_000, cell: 1e-4, delta: 1e-5 }
    }
}

impl Defaults {
    pub fn load() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            None => Ok(Self::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("config: {e}")))
            }
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Failed(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Failed(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Failed(Error::Io(e))
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Exit status for a library error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Domain(_) | Error::Parse(_) => 2,
        _ => 3,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not errors
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return 1;
            }
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    let outcome = Defaults::load().map_err(Failure::from).and_then(|defaults| execute(&cli, &defaults));
    let result = outcome.and_then(|artifact| match &cli.output {
        Some(path) => std::fs::write(path, artifact).map_err(Failure::from),
        None => stdout.write_all(artifact.as_bytes()).map_err(Failure::from),
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "usage error: {msg}");
            1
        }
        Err(Failure::Failed(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn format_for(cli: &Cli, default: Format, allowed: &[Format]) -> std::result::Result<Format, Failure> {
    let format = cli.format.unwrap_or(default);
    if allowed.contains(&format) {
        Ok(format)
    } else {
        Err(usage(format!("format {format:?} is not available for this command")))
    }
}

fn execute(cli: &Cli, defaults: &Defaults) -> std::result::Result<String, Failure> {
    let grid = cli.grid.unwrap_or(defaults.grid);
    if grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    match &cli.command {
        Command::Compose { curves, delta, cell, method } => {
            let format = format_for(cli, Format::Json, &[Format::Json, Format::Csv, Format::Svg])?;
            let named = load_curves(curves)?;
            if named.is_empty() {
                return Err(usage("compose needs at least one curve"));
            }
            let delta = delta.unwrap_or(defaults.delta);
            let cell = cell.unwrap_or(defaults.cell);
            let only_gaussian = curves.pure.is_empty() && curves.mech.is_empty() && curves.curve.is_empty();
            let closed = if only_gaussian { Some(compose_gaussian(&curves.gaussian)?) } else { None };
            let m = named.len();
            let list: Vec<TradeoffCurve> = named.into_iter().map(|(_, c)| c).collect();
            let (lower, upper, mut report) = match method {
                ComposeChoice::ClosedForm => {
                    let mu = closed.ok_or_else(|| usage("the closed form needs Gaussian curves only"))?;
                    let g = TradeoffCurve::gaussian(mu)?;
                    let eps = eps_at_delta(&g, delta)?;
                    (g.clone(), g, json!({ "method": "ClosedForm", "eps_lower": eps, "eps_upper": eps }))
                }
                ComposeChoice::Fft | ComposeChoice::Clt => {
                    let r = if *method == ComposeChoice::Fft { compose_tensor(&list, cell)? } else { clt_compose(&list)? };
                    let (lo, hi) = r.eps_bounds(delta)?;
                    let mut v = json!({
                        "method": r.method,
                        "eps_lower": lo,
                        "eps_upper": hi,
                        "diagnostics": r.diagnostics,
                    });
                    if *method == ComposeChoice::Fft {
                        v["cell"] = json!(cell);
                    }
                    (r.lower, r.upper, v)
                }
            };
            report["m"] = json!(m);
            report["delta"] = json!(delta);
            if let Some(mu) = closed {
                report["mu"] = json!(mu);
            }
            match format {
                Format::Json => Ok(to_json(&report)),
                Format::Csv => Ok(curve_csv(&lower, grid)),
                Format::Svg => Ok(plot_svg(&[("lower".into(), lower), ("upper".into(), upper)], grid)),
            }
        }
        Command::Convert { curves, eps, delta, gamma } => {
            let format = format_for(cli, Format::Json, &[Format::Json, Format::Csv])?;
            let curve = single_curve(curves)?;
            if format == Format::Csv {
                let grid: Vec<f64> =
                    if eps.is_empty() { (0..=100).map(|i| i as f64 / 10.0).collect() } else { eps.clone() };
                let mut out = String::from("eps,delta\n");
                for e in grid {
                    let _ = writeln!(out, "{:.16e},{:.16e}", e, delta_at_eps(&curve, e));
                }
                return Ok(out);
            }
            let mut results = Vec::new();
            for &e in eps {
                if !(e >= 0.0) {
                    return Err(Error::domain(format!("eps must be nonnegative, got {e}")).into());
                }
                results.push(json!({ "eps": e, "delta": delta_at_eps(&curve, e) }));
            }
            for &d in delta {
                results.push(json!({ "delta": d, "eps": eps_at_delta(&curve, d)? }));
            }
            for &g in gamma {
                results.push(json!({ "gamma": g, "renyi": curve.renyi(g)? }));
            }
            match results.len() {
                0 => Err(usage("convert needs --eps, --delta or --gamma")),
                1 => Ok(to_json(&results[0])),
                _ => Ok(to_json(&json!({ "results": results }))),
            }
        }
        Command::Dpsgd { sigma, p, steps, method, delta, cell } => {
            let format = format_for(cli, Format::Json, &[Format::Json, Format::Csv, Format::Svg])?;
            let delta = delta.unwrap_or(defaults.delta);
            let which = match method {
                DpsgdChoice::Gdp => DpsgdMethod::GdpLimit,
                DpsgdChoice::Edgeworth => DpsgdMethod::Edgeworth,
                DpsgdChoice::Fft => DpsgdMethod::Fft,
            };
            let r = dpsgd_account_with_cell(*sigma, *p, *steps, which, delta, cell.unwrap_or(defaults.cell))?;
            let mut report = json!({
                "method": method.to_possible_value().map(|v| v.get_name().to_string()),
                "sigma": sigma,
                "p": p,
                "T": steps,
                "delta": delta,
                "eps": r.eps,
            });
            if let Some(mu) = r.mu {
                report["mu"] = json!(mu);
            }
            if let Some((lo, hi)) = r.eps_bracket {
                report["eps_lower"] = json!(lo);
                report["eps_upper"] = json!(hi);
            }
            match format {
                Format::Json => Ok(to_json(&report)),
                Format::Csv => Ok(curve_csv(&r.curve, grid)),
                Format::Svg => Ok(plot_svg(&[("DP-SGD".into(), r.curve)], grid)),
            }
        }
        Command::Mixture { spec, delta } => {
            let format = format_for(cli, Format::Csv, &[Format::Json, Format::Csv, Format::Svg])?;
            let spec = read_spec(spec)?;
            let curve = spec.curve()?;
            let delta = delta.unwrap_or(defaults.delta);
            match format {
                Format::Csv => Ok(curve_csv(&curve, grid)),
                Format::Svg => Ok(plot_svg(&[("mixture".into(), curve)], grid)),
                Format::Json => Ok(to_json(&json!({
                    "delta": delta,
                    "eps": eps_at_delta(&curve, delta)?,
                    "knots": export_knots(&curve, grid).len(),
                    "symmetric": curve.is_symmetric(),
                }))),
            }
        }
        Command::Census { table, delta, cell } => {
            format_for(cli, Format::Json, &[Format::Json])?;
            let table = AllocationTable::from_path(table)?;
            let r = census_compose(&table, delta.unwrap_or(defaults.delta), cell.unwrap_or(defaults.cell))?;
            Ok(to_json(&serde_json::to_value(&r.summary).map_err(|e| Error::Parse(e.to_string()))?))
        }
        Command::Cnd { curves, samples, seed } => {
            let format = format_for(cli, Format::Json, &[Format::Json, Format::Csv])?;
            let noise = construct_cnd(&single_curve(curves)?)?;
            if format == Format::Csv {
                let (lo, hi) = (noise.quantile(1e-6), noise.quantile(1.0 - 1e-6));
                let mut out = String::from("x,cdf\n");
                for i in 0..=400 {
                    let x = lo + (hi - lo) * i as f64 / 400.0;
                    let _ = writeln!(out, "{:.16e},{:.16e}", x, noise.cdf(x));
                }
                return Ok(out);
            }
            let check = noise.verify();
            let mut report = json!({
                "fixed_point": noise.fixed_point(),
                "shift_dominance": check.shift_dominance,
                "unit_shift_equality": check.unit_shift_equality,
                "self_consistency": check.self_consistency,
                "symmetry": check.symmetry,
                "worst": check.worst(),
            });
            if let Some(n) = samples {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                report["seed"] = json!(seed);
                report["samples"] = json!(noise.sample(&mut rng, *n));
            }
            Ok(to_json(&report))
        }
        Command::Verify { check, curves, n, seed, eps, gamma } => {
            format_for(cli, Format::Json, &[Format::Json])?;
            match check {
                VerifyCheck::Mc => {
                    if curves.gaussian.len() != 1 || curves.pure.len() + curves.mech.len() + curves.curve.len() > 0 {
                        return Err(usage("verify mc needs exactly one --gaussian"));
                    }
                    let mu = curves.gaussian[0];
                    let truth = TradeoffCurve::gaussian(mu)?;
                    let alphas: Vec<f64> = (1..=20).map(|i| (i as f64 - 0.5) / 20.0).collect();
                    let est = mc_tradeoff(
                        |r: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(r) },
                        |r: &mut ChaCha8Rng| -> f64 { mu + Distribution::<f64>::sample(&StandardNormal, r) },
                        |&x| mu * (0.5 * mu - x),
                        *n,
                        &alphas,
                        *seed,
                    )?;
                    let points: Vec<Value> = (0..alphas.len())
                        .map(|i| {
                            json!({
                                "alpha": est.alphas[i],
                                "beta": est.betas[i],
                                "half_width": est.half_widths[i],
                                "exact": truth.value(est.alphas[i]),
                            })
                        })
                        .collect();
                    Ok(to_json(&json!({
                        "check": "mc",
                        "mu": mu,
                        "n": n,
                        "seed": seed,
                        "covered": est.covered_by_band(&truth),
                        "points": points,
                        "warning": est.warning,
                    })))
                }
                VerifyCheck::Renyi => {
                    let eps_grid: Vec<f64> =
                        if eps.is_empty() { (10..=500).map(|i| i as f64 / 100.0).collect() } else { eps.clone() };
                    let gammas = if gamma.is_empty() { vec![1.01, 1.1, 2.0, 5.0, 10.0, 100.0] } else { gamma.clone() };
                    let w = renyi_counterexample_search(&eps_grid, &gammas)?;
                    let mut v = serde_json::to_value(&w).map_err(|e| Error::Parse(e.to_string()))?;
                    v["check"] = json!("renyi");
                    Ok(to_json(&v))
                }
                VerifyCheck::Curve => {
                    let curve = single_curve(curves)?;
                    Ok(to_json(&json!({
                        "check": "curve",
                        "valid": true,
                        "symmetric": curve.is_symmetric(),
                        "knots": export_knots(&curve, grid).len(),
                        "max_divergence": curve.max_divergence(),
                        "total_variation": curve.total_variation(),
                    })))
                }
            }
        }
        Command::Plot { curves } => {
            format_for(cli, Format::Svg, &[Format::Svg])?;
            let named = load_curves(curves)?;
            if named.is_empty() {
                return Err(usage("plot needs at least one curve"));
            }
            Ok(plot_svg(&named, grid))
        }
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn read_spec(path: &Path) -> Result<MechanismSpec> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Named curves from every source, in flag order by kind.
fn load_curves(args: &CurveArgs) -> Result<Vec<(String, TradeoffCurve)>> {
    let mut out = Vec::new();
    for &mu in &args.gaussian {
        out.push((format!("G_{mu}"), TradeoffCurve::gaussian(mu)?));
    }
    for &eps in &args.pure {
        out.push((format!("f_{{{eps},0}}"), TradeoffCurve::eps_delta(eps, 0.0)?));
    }
    for path in &args.mech {
        out.push((stem(path), read_spec(path)?.curve()?));
    }
    for path in &args.curve {
        out.push((stem(path), read_curve_csv(std::fs::File::open(path)?)?));
    }
    Ok(out)
}

fn single_curve(args: &CurveArgs) -> std::result::Result<TradeoffCurve, Failure> {
    let mut curves = load_curves(args)?;
    if curves.len() != 1 {
        return Err(usage(format!("expected exactly one curve, got {}", curves.len())));
    }
    Ok(curves.pop().expect("one curve").1)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

/// Exact knots when the curve has them, else a tangent discretization (never overstates privacy).
pub fn export_knots(curve: &TradeoffCurve, grid: usize) -> Vec<(f64, f64)> {
    curve.exact_knots().unwrap_or_else(|| curve.discretize(&alpha_grid(grid), Discretization::Tangent))
}

/// Curve file contents: header `alpha,beta`, one knot per line in `{:.16e}`.
pub fn curve_csv(curve: &TradeoffCurve, grid: usize) -> String {
    let mut out = String::from("alpha,beta\n");
    for (a, b) in export_knots(curve, grid) {
        let _ = writeln!(out, "{a:.16e},{b:.16e}");
    }
    out
}

#[derive(Deserialize)]
struct KnotRow {
    alpha: f64,
    beta: f64,
}

/// Reads a curve file written by [`curve_csv`] or by hand.
pub fn read_curve_csv(reader: impl Read) -> Result<TradeoffCurve> {
    let mut csv = csv::Reader::from_reader(reader);
    let headers = csv.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["alpha", "beta"] {
        return Err(Error::Parse(format!("expected header alpha,beta, found {headers:?}")));
    }
    let knots = csv
        .deserialize()
        .map(|row| row.map(|r: KnotRow| (r.alpha, r.beta)))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(e.to_string()))?;
    TradeoffCurve::from_knots(knots)
}

const PLOT_SIZE: f64 = 400.0;
const PLOT_MARGIN: f64 = 50.0;
const PLOT_POINTS: usize = 1001;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn plot_xy(alpha: f64, beta: f64) -> (f64, f64) {
    (PLOT_MARGIN + alpha * PLOT_SIZE, PLOT_MARGIN + (1.0 - beta) * PLOT_SIZE)
}

fn polyline_points(knots: &[(f64, f64)]) -> String {
    let mut s = String::new();
    for (i, &(a, b)) in knots.iter().enumerate() {
        let (x, y) = plot_xy(a, b);
        let _ = write!(s, "{}{x:.3},{y:.3}", if i == 0 { "" } else { " " });
    }
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG drawing of named curves on the unit square with the identity diagonal.
/// The output depends only on the inputs.
pub fn plot_svg(curves: &[(String, TradeoffCurve)], grid: usize) -> String {
    let full = PLOT_SIZE + 2.0 * PLOT_MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full}" viewBox="0 0 {full} {full}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{full}" height="{full}" fill="white"/>"#);
    let (x0, y0) = plot_xy(0.0, 0.0);
    let (x1, y1) = plot_xy(1.0, 1.0);
    let _ = writeln!(
        s,
        r#"<rect x="{x0}" y="{y1}" width="{PLOT_SIZE}" height="{PLOT_SIZE}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (x, _) = plot_xy(t, 0.0);
        let (_, y) = plot_xy(0.0, t);
        let _ = writeln!(s, r#"<text x="{x}" y="{}" font-size="11" text-anchor="middle">{t}</text>"#, y0 + 16.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{t}</text>"#, x0 - 6.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">α (type I error)</text>"#, (x0 + x1) / 2.0, y0 + 36.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 {} {})">β (type II error)</text>"#,
        x0 - 34.0,
        (y0 + y1) / 2.0,
        x0 - 34.0,
        (y0 + y1) / 2.0
    );
    let _ = writeln!(
        s,
        r#"<polyline class="reference" points="{}" fill="none" stroke="gray" stroke-dasharray="4 3"/>"#,
        polyline_points(&[(0.0, 1.0), (1.0, 0.0)])
    );
    for (i, (name, curve)) in curves.iter().enumerate() {
        let knots = match curve.exact_knots() {
            Some(k) if k.len() <= PLOT_POINTS => k,
            _ => curve.discretize(&alpha_grid(grid.min(PLOT_POINTS)), Discretization::Tangent),
        };
        let colour = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<polyline class="curve" data-name="{}" points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            escape(name),
            polyline_points(&knots)
        );
        let ly = y1 + 18.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/>"#, x1 - 150.0, x1 - 130.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12">{}</text>"#, x1 - 124.0, ly + 4.0, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("fdp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let g = TradeoffCurve::gaussian(1.0).unwrap();
        let text = curve_csv(&g, 10_000);
        let back = read_curve_csv(text.as_bytes()).unwrap();
        let original = TradeoffCurve::from_knots(export_knots(&g, 10_000)).unwrap();
        assert!(back.sup_distance(&original, 10_001) <= 1e-15);
    }

    #[test]
    fn plot_has_one_polyline_per_curve() {
        let one = plot_svg(&[("Id".into(), TradeoffCurve::identity())], 100);
        assert_eq!(one.matches("class=\"curve\"").count(), 1);
        assert_eq!(one.matches("class=\"reference\"").count(), 1);
        let two = plot_svg(
            &[("G_1".into(), TradeoffCurve::gaussian(1.0).unwrap()), ("f".into(), TradeoffCurve::eps_delta(1.0, 0.0).unwrap())],
            10_000,
        );
        assert_eq!(two.matches("<polyline").count(), 3);
        assert_eq!(two, plot_svg(&[("G_1".into(), TradeoffCurve::gaussian(1.0).unwrap()), ("f".into(), TradeoffCurve::eps_delta(1.0, 0.0).unwrap())], 10_000));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["compose", "--bogus"]).0, 1);
        assert_eq!(run_args(&["compose"]).0, 1);
        assert_eq!(run_args(&["--help"]).0, 0);
        assert_eq!(run_args(&["dpsgd", "--sigma", "-1", "--p", "0.1", "--T", "10"]).0, 2);
        assert_eq!(run_args(&["census", "--table", "/nonexistent/table.csv"]).0, 3);
        assert_eq!(run_args(&["plot", "--gaussian", "1", "--format", "json"]).0, 1);
    }

    #[test]
    fn gdp_limit_from_the_command_line() {
        let (code, out, _) = run_args(&["dpsgd", "--sigma", "1", "--p", "0.01", "--T", "10000", "--method", "gdp"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["mu"].as_f64().unwrap() - (1f64.exp() - 1.0).sqrt()).abs() < 1e-12);
    }
}
