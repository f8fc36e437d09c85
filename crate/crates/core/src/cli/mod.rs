//! Command-line front end: `build | verify | classify | ode-check`.
//!
//! Exit codes: 0 when every check passes, 1 when a numerical check fails,
//! 2 for configuration errors. `CALABI_THREADS` caps the worker pool.

pub mod config;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::ambient::space_residual;
use crate::classifier::{classify, VerdictKind};
use crate::error::Error;
use crate::geometry::{residual_summary, Tolerances};
use crate::odecheck::{build_solutions, independence_check, riccati_residual, u_constancy, UCase, NULL_DERIVATIVE_TOL};
use crate::products::ExpectedLambdas;
use crate::sampling::{interior_points, DEFAULT_MARGIN};

use config::{build, declared_minimal, Built, RunConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use report::{Artifact, Check, Report, SamplePoint, Timing};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Default grid size for profile checks.
pub const ODE_GRID: usize = 100;

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Number of sample points (grid size for ode-check).
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for the quasi-random sample shift.
    #[arg(long)]
    seed: Option<u64>,
    /// Override for the second-order geometric tolerance.
    #[arg(long = "tol-geom")]
    tol_geom: Option<f64>,
    /// Where to write the JSON report (stdout when absent).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(name = "calabi", version, about = "Build, verify and classify Lagrangian warped and Calabi products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Materialize the chart and record sample points.
    Build(RunArgs),
    /// Run the induced-geometry residual suite.
    Verify(RunArgs),
    /// Detect Calabi structure from sampled cubic forms.
    Classify(RunArgs),
    /// Check the profile functions and the solutions built from them.
    OdeCheck(RunArgs),
}

impl Command {
    fn split(self) -> (CommandName, RunArgs) {
        match self {
            Command::Build(a) => (CommandName::Build, a),
            Command::Verify(a) => (CommandName::Verify, a),
            Command::Classify(a) => (CommandName::Classify, a),
            Command::OdeCheck(a) => (CommandName::OdeCheck, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandName {
    Build,
    Verify,
    Classify,
    OdeCheck,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Build => "build",
            CommandName::Verify => "verify",
            CommandName::Classify => "classify",
            CommandName::OdeCheck => "ode-check",
        }
    }
}

/// Settings after applying command-line overrides to the config.
#[derive(Clone, Debug)]
pub struct RunSettings {
    pub samples: Option<usize>,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl RunSettings {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self { samples: cfg.samples, seed: cfg.seed.unwrap_or(DEFAULT_SEED), tolerances: cfg.tolerances }
    }
}

/// Failure of a run before any numbers were checked.
#[derive(Debug)]
pub struct ConfigFailure(pub String);

fn eval_failure(name: &str, e: &Error) -> Check {
    Check { name: format!("{name}: {e}"), max_residual: f64::NAN, tolerance: 0.0, pass: false }
}

/// Runs one command on a validated config. Configuration and construction
/// errors come back as `Err`; numerical failures are failing checks.
pub fn run(
    cfg: &RunConfig,
    raw: Value,
    command: CommandName,
    settings: &RunSettings,
) -> std::result::Result<Report, ConfigFailure> {
    let start = Instant::now();
    let built = build(&cfg.construction).map_err(|e| ConfigFailure(e.to_string()))?;
    let tol = settings.tolerances;
    let samples = settings.samples.unwrap_or(if command == CommandName::OdeCheck { ODE_GRID } else { DEFAULT_SAMPLES });
    if samples == 0 {
        return Err(ConfigFailure("samples must be positive".into()));
    }
    let mut report = Report {
        artifact: Artifact::default(),
        command: command.as_str().into(),
        config: raw,
        construction: built.label(),
        samples,
        seed: settings.seed,
        tolerances: tol,
        checks: vec![],
        verdict: None,
        points: vec![],
        timing: Timing { elapsed_seconds: 0.0 },
        pass: false,
    };
    let chart = built.chart();
    let pts = interior_points(chart.domain(), samples, settings.seed, DEFAULT_MARGIN);
    match command {
        CommandName::Build => {
            let mut worst: f64 = 0.0;
            for u in &pts {
                match chart.eval_point(u).and_then(|z| space_residual(&z, &chart.space()).map(|r| (z, r))) {
                    Ok((z, r)) => {
                        worst = worst.max(r);
                        report.points.push(SamplePoint { u: u.clone(), z: z.iter().map(|c| [c.re, c.im]).collect() });
                    }
                    Err(e) => {
                        report.checks.push(eval_failure("evaluation", &e));
                        break;
                    }
                }
            }
            report.checks.push(Check::at_most("space", worst, tol.construction));
        }
        CommandName::Verify => match residual_summary(chart, &pts) {
            Ok(s) => {
                report.checks.extend([
                    Check::at_most("space", s.space, tol.construction),
                    Check::at_most("lagrangian", s.lagrangian, tol.first_order),
                    Check::at_most("frame_orthonormality", s.frame_orthonormality, tol.first_order),
                    Check::at_most("christoffel_mismatch", s.christoffel_mismatch, tol.second_order),
                    Check::at_most("decomposition", s.decomposition, tol.second_order),
                    Check::at_most("cubic_symmetry", s.cubic_symmetry, tol.second_order),
                    Check::at_most("gauss", s.gauss, tol.second_order),
                    Check::at_most("codazzi", s.codazzi, tol.codazzi),
                ]);
                if declared_minimal(&cfg.construction) {
                    report.checks.push(Check::at_most("mean_curvature", s.mean_curvature_max, tol.minimality));
                }
            }
            Err(e) => report.checks.push(eval_failure("evaluation", &e)),
        },
        CommandName::Classify => match classify(chart, &pts, tol.classifier) {
            Ok(v) => {
                report.checks.push(Check::at_most("lagrangian", v.diagnostics.lagrangian_max, tol.first_order));
                expectation_checks(&built, &v, &tol, &mut report.checks);
                report.verdict = Some(v);
            }
            Err(e) => report.checks.push(eval_failure("classification", &e)),
        },
        CommandName::OdeCheck => {
            let prof = match built.profile() {
                Ok(Some(p)) => p,
                Ok(None) => return Err(ConfigFailure("ode-check needs a construction with a profile curve".into())),
                Err(e) => return Err(ConfigFailure(e.to_string())),
            };
            let (lo, hi) = prof.interval();
            let grid: Vec<f64> = if samples == 1 {
                vec![lo]
            } else {
                (0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect()
            };
            if let Err(e) = ode_checks(&prof, &grid, &tol, &mut report.checks) {
                report.checks.push(eval_failure("evaluation", &e));
            }
        }
    }
    report.timing.elapsed_seconds = start.elapsed().as_secs_f64();
    report.finish();
    Ok(report)
}

fn expectation_checks(built: &Built, v: &crate::classifier::ClassifierVerdict, tol: &Tolerances, out: &mut Vec<Check>) {
    let kind_check = |want: VerdictKind| Check {
        name: format!("verdict {want:?}"),
        max_residual: if v.kind == want { 0.0 } else { 1.0 },
        tolerance: 0.0,
        pass: v.kind == want,
    };
    let dev = |i: usize, x: f64| v.lambdas.get(i).map_or(f64::NAN, |l| (l - x).abs());
    match built.expected() {
        Some(ExpectedLambdas::WithPoint { lambda1, lambda2 }) => {
            out.push(kind_check(VerdictKind::CalabiWithPoint));
            out.push(Check::at_most("lambda1", dev(0, lambda1), tol.classifier));
            out.push(Check::at_most("lambda2", dev(1, lambda2), tol.classifier));
            out.push(Check::at_most(
                "lambda_relation",
                v.diagnostics.lambda_relation.unwrap_or(f64::NAN),
                tol.first_order,
            ));
        }
        Some(ExpectedLambdas::TwoFactor { lambda1, lambda2, lambda3, .. }) => {
            out.push(kind_check(VerdictKind::CalabiTwoFactor));
            out.push(Check::at_most("lambda1", dev(0, lambda1), tol.classifier));
            out.push(Check::at_most("lambda2", dev(1, lambda2), tol.classifier));
            out.push(Check::at_most("lambda3", dev(2, lambda3), tol.classifier));
        }
        None => {}
    }
}

fn ode_checks(
    prof: &std::sync::Arc<crate::legendre::ProfileFunctions>,
    grid: &[f64],
    tol: &Tolerances,
    out: &mut Vec<Check>,
) -> crate::Result<()> {
    let bundle = build_solutions(prof.clone());
    let (mut ric, mut ode, mut indep): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut case = UCase::UNonzero;
    let mut ftilde0 = f64::NAN;
    for (i, &t) in grid.iter().enumerate() {
        ric = ric.max(riccati_residual(prof, t)?);
        for m in bundle.basis() {
            ode = ode.max(bundle.ode_residual(m, t)?);
        }
        let r = independence_check(&bundle, t)?;
        case = r.case;
        indep = indep.max(r.deviation);
        if i == 0 {
            ftilde0 = r.ftilde_prime.norm();
        }
    }
    let (mean, maxdev) = u_constancy(prof, grid)?;
    // relative drift; |c| = 1 sets the scale when u vanishes
    let drift = maxdev / mean.abs().max(1.0);
    out.push(Check::at_most("riccati", ric, tol.ode));
    out.push(Check::at_most("u_conservation", drift, tol.conservation));
    out.push(Check::at_most("ode_residual", ode, tol.ode));
    match case {
        UCase::UNonzero => out.push(Check::at_most("ratio_derivative_modulus", indep, tol.conservation)),
        UCase::UZero => {
            out.push(Check::at_most("ratio_derivative_vanishes", indep, NULL_DERIVATIVE_TOL));
            out.push(Check::above("second_ratio_derivative", ftilde0, 0.0));
        }
    }
    Ok(())
}

fn init_threads() {
    if let Some(n) = std::env::var("CALABI_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            // a pool may already exist when embedded; the cap is then best effort
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    init_threads();
    let (command, a) = cli.command.split();
    let text = match std::fs::read_to_string(&a.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", a.config.display());
            return EXIT_CONFIG;
        }
    };
    let raw: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let cfg = match RunConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let mut settings = RunSettings::from_config(&cfg);
    if a.samples.is_some() {
        settings.samples = a.samples;
    }
    if let Some(s) = a.seed {
        settings.seed = s;
    }
    if let Some(t) = a.tol_geom {
        if !(t > 0.0) {
            eprintln!("config error: --tol-geom must be positive");
            return EXIT_CONFIG;
        }
        settings.tolerances.second_order = t;
    }
    let report = match run(&cfg, raw, command, &settings) {
        Ok(r) => r,
        Err(ConfigFailure(msg)) => {
            eprintln!("config error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let json = report.to_json();
    match a.report.or(cfg.report_path.clone()) {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, json + "\n") {
                eprintln!("cannot write report {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        }
        None => println!("{json}"),
    }
    if report.pass {
        eprintln!("{}: PASS ({} checks)", report.command, report.checks.len());
        EXIT_PASS
    } else {
        if let Some(c) = report.first_failure() {
            eprintln!(
                "{}: FAIL at `{}`: {:e} against tolerance {:e}",
                report.command, c.name, c.max_residual, c.tolerance
            );
        }
        EXIT_NUMERIC
    }
}
