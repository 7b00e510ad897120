//! The `blowup-lab` command line: argument parsing, config files, dispatch, output.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::asymptotics::fit_boundary_expansion;
use crate::blowcurve::{trace_s, CurveOptions};
use crate::error::{Error, Result};
use crate::manifolds::{connecting_orbit, fixed_point_catalog, OrbitOptions};
use crate::params::{derived_quantities, ProblemParams};
use crate::radial::{estimate_blowup_radius_with, integrate_regular, natural_length, IntegratorConfig, RadialSystem};
use crate::verify::run_suite;

#[derive(Parser, Debug)]
#[command(name = "blowup-lab", version, about = "Large radial solutions of a weighted Lane-Emden system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exponents and constants as JSON.
    Constants(Common),
    /// Regular solution from (u0, v0) as CSV, up to blow-up.
    Integrate(Common),
    /// Blow-up radius with its extrapolation trail and boundary fit, as JSON.
    Blowup(Common),
    /// Data blowing up at R = 1 on a θ grid (CSV) with a JSON summary.
    Curve(Common),
    /// Fixed points of the origin chart with spectra, as JSON.
    FixedPoints(Common),
    /// Orbit from M0 to its α-limit and the implied global solution, as JSON.
    Connect(Common),
    /// Run the verification suite.
    Verify {
        #[arg(long, default_value = "paper")]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    #[arg(long = "N", allow_hyphen_values = true)]
    pub big_n: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub u0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub v0: Option<f64>,
    /// Number of points (curve).
    #[arg(long = "n")]
    pub n_points: Option<usize>,
    /// Relative integration tolerance.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON file with any of the above; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Settings read from `--config`. Parameters may be given flat or under `problem`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub problem: Option<PartialParams>,
    #[serde(rename = "N")]
    pub big_n: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub delta: Option<f64>,
    pub mu: Option<f64>,
    pub u0: Option<f64>,
    pub v0: Option<f64>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialParams {
    #[serde(rename = "N")]
    pub big_n: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub delta: Option<f64>,
    pub mu: Option<f64>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: ProblemParams,
    pub u0: f64,
    pub v0: f64,
    pub n_points: usize,
    pub config: IntegratorConfig,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Common {
    pub fn resolve(&self) -> Result<Resolved> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidArgument(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| Error::InvalidArgument(format!("bad config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        let nested = file.problem.clone().unwrap_or_default();
        let pick = |flag: Option<f64>, flat: Option<f64>, deep: Option<f64>, default: f64| {
            flag.or(flat).or(deep).unwrap_or(default)
        };
        let params = ProblemParams::new(
            pick(self.big_n, file.big_n, nested.big_n, 3.0),
            pick(self.a, file.a, nested.a, 0.0),
            pick(self.b, file.b, nested.b, 0.0),
            pick(self.delta, file.delta, nested.delta, 2.0),
            pick(self.mu, file.mu, nested.mu, 2.0),
        );
        if [params.n, params.a, params.b, params.delta, params.mu].iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("parameters must be finite".into()));
        }
        let u0 = self.u0.or(file.u0).unwrap_or(1.0);
        let v0 = self.v0.or(file.v0).unwrap_or(1.0);
        if !(u0.is_finite() && v0.is_finite()) {
            return Err(Error::InvalidArgument(format!("initial data must be finite, got ({u0}, {v0})")));
        }
        let mut config = IntegratorConfig::default();
        if let Some(t) = self.tol.or(file.tol) {
            config.rel_tol = t;
        }
        config.validate()?;
        Ok(Resolved {
            params,
            u0,
            v0,
            n_points: self.n_points.or(file.n).unwrap_or(33),
            config,
            out: self.out.clone().or(file.out),
            seed: self.seed.or(file.seed).unwrap_or(1),
        })
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn with_extension(p: &Path, ext: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

/// Two-column whitespace-separated file.
fn write_columns(path: &Path, rows: impl Iterator<Item = (f64, f64)>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (x, y) in rows {
        writeln!(w, "{x:.17e} {y:.17e}")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct BlowupReport {
    params: ProblemParams,
    u0: f64,
    v0: f64,
    estimate: crate::radial::BlowupEstimate,
    boundary_fit: Option<crate::asymptotics::BoundaryFit>,
}

/// Execute a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Constants(c) => {
            let r = c.resolve()?;
            write_json(&r.out, &derived_quantities(&r.params)?)?;
            Ok(0)
        }
        Command::Integrate(c) => {
            let r = c.resolve()?;
            r.params.validate_regular()?;
            let len = natural_length(&RadialSystem::cone(r.params.clone()), r.u0, r.v0)?;
            let traj = integrate_regular(&r.params, r.u0, r.v0, 1e6 * len, &r.config)?;
            let mut w = sink(&r.out)?;
            traj.write_csv(&mut w)?;
            w.flush()?;
            Ok(0)
        }
        Command::Blowup(c) => {
            let r = c.resolve()?;
            r.params.validate_blowup()?;
            let len = natural_length(&RadialSystem::cone(r.params.clone()), r.u0, r.v0)?;
            let traj = integrate_regular(&r.params, r.u0, r.v0, 1e6 * len, &r.config)?;
            let estimate = estimate_blowup_radius_with(&traj)?;
            let boundary_fit = fit_boundary_expansion(&traj, estimate.r_hat, 1e-2, 2e-2).ok();
            let report = BlowupReport { params: r.params, u0: r.u0, v0: r.v0, estimate, boundary_fit };
            write_json(&r.out, &report)?;
            Ok(0)
        }
        Command::Curve(c) => {
            let r = c.resolve()?;
            if r.params.a != 0.0 || r.params.b != 0.0 {
                return Err(Error::invalid("the curve is defined without weights", "set a = b = 0"));
            }
            let opts = CurveOptions { n_points: r.n_points, config: r.config.clone(), ..Default::default() };
            let trace = trace_s(r.params.n, r.params.delta, r.params.mu, &opts)?;
            let mut w = sink(&r.out)?;
            trace.write_csv(&mut w)?;
            w.flush()?;
            let summary = serde_json::to_string_pretty(&trace)?;
            match &r.out {
                Some(p) => {
                    std::fs::write(with_extension(p, ".json"), summary + "\n")?;
                    write_columns(&with_extension(p, ".dat"), trace.points.iter().map(|q| (q.u0, q.v0)))?;
                }
                None => eprintln!("{summary}"),
            }
            Ok(0)
        }
        Command::FixedPoints(c) => {
            let r = c.resolve()?;
            r.params.validate_regular()?;
            write_json(&r.out, &fixed_point_catalog(&r.params)?)?;
            Ok(0)
        }
        Command::Connect(c) => {
            let r = c.resolve()?;
            let orbit = connecting_orbit(&r.params, &OrbitOptions::for_params(&r.params))?;
            write_json(&r.out, &orbit)?;
            if let Some(p) = &r.out {
                let mut w = BufWriter::new(File::create(with_extension(p, ".phase.csv"))?);
                orbit.trajectory.write_csv(&mut w)?;
                w.flush()?;
                let ls = &orbit.log_solution;
                write_columns(&with_extension(p, ".u.dat"), ls.iter().map(|s| (s[0], s[1])))?;
                write_columns(&with_extension(p, ".v.dat"), ls.iter().map(|s| (s[0], s[2])))?;
            }
            Ok(if orbit.passed() { 0 } else { 4 })
        }
        Command::Verify { suite, common } => {
            if suite != "paper" {
                return Err(Error::InvalidArgument(format!("unknown suite {suite:?}; available: paper")));
            }
            let r = common.resolve()?;
            let report = run_suite(r.seed);
            print!("{}", report.markdown());
            if let Some(p) = &r.out {
                write_json(&Some(p.clone()), &report)?;
            }
            Ok(if report.passed() { 0 } else { 4 })
        }
    }
}

/// Parse, run and map errors to exit codes: 2 invalid input, 3 integration failure,
/// 4 failed claim.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
