//! Command-line front end.
//!
//! Every subcommand prints one JSON report on stdout and a short summary on
//! stderr. Exit codes: 0 when every residual is within tolerance, 1 when one
//! is not, 2 for usage and input errors.
//!
//! Tolerances come from the built-in defaults, then `SPINFIBER_TOL`, then
//! `--tol`, then `--tol-<name>` for the check or tolerance called `<name>`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::clifford::deformed_gammas;
use crate::decompose::{exponential_parts_with, factorize_with};
use crate::error::Error;
use crate::fiber::{aggregate, total_norm, BaseGrid, TransportPlan};
use crate::frw::{frw_generator, frw_lie_operator, frw_motion, frw_tetrad, snap_t2, ScaleFactor};
use crate::geometry::{
    check_orthonormality, covariant_derivative, flow_exponentiate, lie_derivative_tetrad, spin_connection,
    ChartBounds, ConstantField, LinearField, VectorField, VectorSource,
};
use crate::io;
use crate::metric::DiagonalMetric;
use crate::spinlift::{intertwining_residual, isometry_residual, lift_isometry_with};
use crate::tolerance::Tolerances;

#[derive(Debug, Parser)]
#[command(name = "spinfiber", version, about = "Spinor representation of GL(4,R) over diagonal metrics")]
struct Cli {
    /// Override every tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for per-sample work.
    #[arg(long, global = true, value_name = "N")]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleKind {
    Exp,
    Power,
    Constant,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factor T = V·Δ·U at a base metric.
    Decompose {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        transform: PathBuf,
    },
    /// Metric-deformed gamma matrices.
    Gamma {
        #[arg(long)]
        metric: PathBuf,
    },
    /// Spin lift of an isometry.
    Lift {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        isometry: PathBuf,
    },
    /// Spin connection of a sampled tetrad.
    Connection {
        #[arg(long)]
        tetrad: PathBuf,
        /// Inverse coordinate metric field, for the orthonormality check.
        #[arg(long)]
        coordinate_metric: Option<PathBuf>,
        /// Spinor field to differentiate covariantly.
        #[arg(long)]
        spinor: Option<PathBuf>,
    },
    /// Lie derivative of a sampled tetrad, and optionally a flow.
    Lie {
        #[arg(long)]
        tetrad: PathBuf,
        #[arg(long)]
        vector: PathBuf,
        /// Flow parameter; needs a constant or linear vector field.
        #[arg(long)]
        flow: Option<f64>,
        /// Flow start point `t,x,y,z`.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.0, 0.0, 0.0])]
        start: Vec<f64>,
    },
    /// Transport a fiber spinor field under a motion.
    Transport {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        motion: PathBuf,
        /// Reference base point for the base shift.
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a fiber spinor field over the base.
    Aggregate {
        #[arg(long)]
        field: PathBuf,
    },
    /// FRW time transport and Lie operator of a fiber field.
    LieFrw {
        #[arg(long, value_enum, default_value = "exp")]
        scale: ScaleKind,
        #[arg(long = "H", default_value_t = 0.0)]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant checks on built-in fixtures.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// The comparable part of a command's output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    /// Input name to content digest.
    pub inputs: BTreeMap<String, String>,
    pub residuals: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub status: Status,
    pub result: Value,
}

/// Tolerance overrides from the environment and the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub global: Option<f64>,
    pub named: BTreeMap<String, f64>,
}

impl Overrides {
    pub fn get(&self, name: &str, default: f64) -> f64 {
        self.named.get(name).copied().or(self.global).unwrap_or(default)
    }

    pub fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            symmetry: self.get("symmetry", d.symmetry),
            jacobi_off_diagonal: self.get("jacobi_off_diagonal", d.jacobi_off_diagonal),
            jacobi_max_sweeps: d.jacobi_max_sweeps,
            isometry: self.get("isometry", d.isometry),
            branch_cut: self.get("branch_cut", d.branch_cut),
            lattice: self.get("lattice", d.lattice),
            singular: self.get("singular", d.singular),
        }
    }
}

struct Builder<'a> {
    command: &'static str,
    overrides: &'a Overrides,
    inputs: BTreeMap<String, String>,
    residuals: BTreeMap<String, f64>,
    tolerances: BTreeMap<String, f64>,
}

impl<'a> Builder<'a> {
    fn new(command: &'static str, overrides: &'a Overrides) -> Self {
        Builder {
            command,
            overrides,
            inputs: BTreeMap::new(),
            residuals: BTreeMap::new(),
            tolerances: BTreeMap::new(),
        }
    }

    fn read(&mut self, name: &str, path: &Path) -> Result<Value, Error> {
        let (value, digest) = io::read_json(path)?;
        self.inputs.insert(name.to_string(), digest);
        Ok(value)
    }

    fn check(&mut self, name: &str, residual: f64, default: f64) {
        self.residuals.insert(name.to_string(), residual);
        self.tolerances.insert(name.to_string(), self.overrides.get(name, default));
    }

    fn finish(self, result: Value) -> RunReport {
        let pass = self
            .residuals
            .iter()
            .all(|(name, r)| *r <= self.tolerances[name]);
        RunReport {
            command: self.command.to_string(),
            inputs: self.inputs,
            residuals: self.residuals,
            tolerances: self.tolerances,
            status: if pass { Status::Pass } else { Status::Fail },
            result,
        }
    }
}

/// Splits `--tol-<name> <value>` and `--tol-<name>=<value>` out of `argv`.
fn extract_named_tolerances(argv: Vec<String>) -> Result<(Vec<String>, BTreeMap<String, f64>), String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut named = BTreeMap::new();
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        let Some(named_arg) = arg.strip_prefix("--tol-") else {
            rest.push(arg);
            continue;
        };
        let (name, value) = match named_arg.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => (named_arg.to_string(), it.next().ok_or(format!("{arg} needs a value"))?),
        };
        let value: f64 = value.parse().map_err(|_| format!("{arg}: not a number: {value}"))?;
        named.insert(name.replace('-', "_"), value);
    }
    Ok((rest, named))
}

/// Runs the command line `argv` (program name first), writing the report to
/// `out` and the summary to `err`. Returns the exit code.
pub fn run_to(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let (argv, named) = match extract_named_tolerances(argv) {
        Ok(x) => x,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let env = match std::env::var("SPINFIBER_TOL") {
        Ok(v) => match v.parse::<f64>() {
            Ok(x) => Some(x),
            Err(_) => {
                let _ = writeln!(err, "error: SPINFIBER_TOL is not a number: {v}");
                return 2;
            }
        },
        Err(_) => None,
    };
    let overrides = Overrides {
        global: cli.tol.or(env),
        named,
    };
    let threads = cli.parallel.unwrap_or(1).max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let outcome = pool.install(|| dispatch(&cli.command, &overrides));
    match outcome {
        Ok(report) => {
            let mut doc = serde_json::to_value(&report).expect("report serializes");
            doc["metadata"] = json!({
                "wall_clock_seconds": start.elapsed().as_secs_f64(),
                "threads": threads,
                "version": env!("CARGO_PKG_VERSION"),
            });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            let _ = writeln!(err, "{}: {}", report.command, summary(&report));
            match report.status {
                Status::Pass => 0,
                Status::Fail => 1,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Runs against the process's stdout and stderr.
pub fn run(argv: Vec<String>) -> i32 {
    run_to(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn summary(report: &RunReport) -> String {
    let mut parts = vec![format!("{:?}", report.status).to_lowercase()];
    for (name, r) in &report.residuals {
        let tol = report.tolerances[name];
        let mark = if *r <= tol { "ok" } else { "FAIL" };
        parts.push(format!("{name}={r:.3e} (tol {tol:.1e}, {mark})"));
    }
    parts.join("; ")
}

fn dispatch(command: &Command, overrides: &Overrides) -> Result<RunReport, Error> {
    let tol = overrides.tolerances();
    match command {
        Command::Decompose { metric, transform } => {
            let mut b = Builder::new("decompose", overrides);
            let d = io::parse_metric(&b.read("metric", metric)?)?;
            let t = io::parse_matrix(&b.read("transform", transform)?)?;
            let f = factorize_with(&t, &d, &tol)?;
            let parts = exponential_parts_with(&f, &tol)?;
            let r = f.residuals(&t);
            b.check("reconstruction", r.reconstruction / t.norm(), 1e-10);
            b.check("right_isometry", r.right_isometry / d.max_abs(), 1e-10);
            b.check("orthogonality", r.orthogonality, 1e-10);
            b.check("det_v", r.det_v, 1e-10);
            b.check("dilatation", r.dilatation / f.target.max_abs(), 1e-10);
            Ok(b.finish(json!({
                "v": io::matrix_json(&f.v),
                "delta": io::matrix_json(&f.delta),
                "u": io::matrix_json(&f.u),
                "source": io::metric_json(&f.source),
                "target": io::metric_json(&f.target),
                "base_shift": f.base_shift.delta,
                "generators": {
                    "v": io::matrix_json(&parts.v),
                    "delta": parts.delta,
                    "u": io::matrix_json(&parts.u),
                },
            })))
        }
        Command::Gamma { metric } => {
            let mut b = Builder::new("gamma", overrides);
            let d = io::parse_metric(&b.read("metric", metric)?)?;
            let rep = deformed_gammas(&d)?;
            b.check("anticommutator", rep.anticommutator_residual() / d.max_abs(), 1e-12);
            Ok(b.finish(json!({
                "metric": io::metric_json(&d),
                "gammas": rep.gammas.iter().map(io::complex_matrix_json).collect::<Vec<_>>(),
            })))
        }
        Command::Lift { metric, isometry } => {
            let mut b = Builder::new("lift", overrides);
            let d = io::parse_metric(&b.read("metric", metric)?)?;
            let l = io::parse_matrix(&b.read("isometry", isometry)?)?;
            let iso = isometry_residual(&l, &d) / d.max_abs();
            b.check("isometry", iso, tol.isometry);
            if iso > b.tolerances["isometry"] {
                return Ok(b.finish(Value::Null));
            }
            let s = lift_isometry_with(&l, &d, &tol)?;
            let rep = deformed_gammas(&d)?;
            b.check(
                "intertwining",
                intertwining_residual(&s.matrix, &l, &rep).unwrap_or(f64::INFINITY),
                1e-9,
            );
            Ok(b.finish(json!({
                "metric": io::metric_json(&d),
                "spin_lift": io::complex_matrix_json(&s.matrix),
            })))
        }
        Command::Connection { tetrad, coordinate_metric, spinor } => {
            let mut b = Builder::new("connection", overrides);
            let e = io::parse_tetrad_field(&b.read("tetrad", tetrad)?)?;
            if let Some(path) = coordinate_metric {
                let g = io::parse_tetrad_field(&b.read("coordinate_metric", path)?)?;
                let report = check_orthonormality(&e, &g, overrides.get("orthonormality", 1e-12))?;
                b.check("orthonormality", report.max, 1e-12);
            }
            let omega = spin_connection(&e)?;
            let mut result = json!({
                "grid": io::grid_json(&e.grid),
                "omega": omega.field.values.iter().map(|w| w.iter().map(|m| io::matrix_json(m)["rows"].clone()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "boundary": omega.boundary,
            });
            if let Some(path) = spinor {
                let psi = io::parse_spinor_field(&b.read("spinor", path)?)?;
                let nabla = covariant_derivative(&psi, &omega, &crate::clifford::standard_gammas())?;
                result["covariant_derivative"] = json!(nabla
                    .field
                    .values
                    .iter()
                    .map(|d| d.iter().map(io::spinor_json).collect::<Vec<_>>())
                    .collect::<Vec<_>>());
                result["covariant_boundary"] = json!(nabla.boundary);
            }
            Ok(b.finish(result))
        }
        Command::Lie { tetrad, vector, flow, start } => {
            let mut b = Builder::new("lie", overrides);
            let e = io::parse_tetrad_field(&b.read("tetrad", tetrad)?)?;
            let zeta = io::parse_vector_input(&b.read("vector", vector)?)?;
            let analytic: Option<Box<dyn VectorField>> = match &zeta {
                io::VectorInput::Constant(c) => Some(Box::new(ConstantField(*c))),
                io::VectorInput::Linear(m) => Some(Box::new(LinearField(*m))),
                io::VectorInput::Sampled(_) => None,
            };
            let source = match (&zeta, &analytic) {
                (io::VectorInput::Sampled(s), _) => VectorSource::Sampled(s),
                (_, Some(f)) => VectorSource::Analytic(f.as_ref()),
                _ => unreachable!(),
            };
            let l = lie_derivative_tetrad(&e, source)?;
            let mut result = json!({ "lie_derivative": io::tetrad_field_json(&l) });
            if let Some(tau) = flow {
                let f = analytic
                    .as_ref()
                    .ok_or_else(|| Error::Input("--flow needs a constant or linear vector field".into()))?;
                let x0: [f64; 4] = start
                    .as_slice()
                    .try_into()
                    .map_err(|_| Error::Input("--start needs four coordinates".into()))?;
                let r = flow_exponentiate(f.as_ref(), x0, *tau, &ChartBounds::unbounded())?;
                result["flow"] = json!({
                    "endpoint": r.endpoint,
                    "jacobian": io::matrix_json(&r.frame_map),
                    "steps": r.steps,
                });
                if let io::VectorInput::Linear(m) = zeta {
                    b.check("flow_exponential", (r.frame_map - crate::mat4::mat_exp(&(m * *tau))).amax(), 1e-8);
                }
            }
            Ok(b.finish(result))
        }
        Command::Transport { field, motion, metric, out } => {
            let mut b = Builder::new("transport", overrides);
            let psi = io::parse_fiber_field(&b.read("field", field)?)?;
            let m = io::parse_motion(&b.read("motion", motion)?)?;
            let d0 = io::parse_metric(&b.read("metric", metric)?)?;
            let plan = TransportPlan::new(&psi, &m, &d0, &tol)?;
            let moved = plan.apply(&psi)?;
            let reconstruction = plan
                .factors
                .iter()
                .enumerate()
                .flat_map(|(frame, row)| row.iter().map(move |f| (frame, f)))
                .map(|(frame, f)| {
                    let t = m.frame(frame);
                    f.residuals(t).reconstruction / t.norm()
                })
                .fold(0.0, f64::max);
            b.check("reconstruction", reconstruction, 1e-10);
            let (before, after) = (total_norm(&psi), total_norm(&moved));
            let preserving = plan.cells[0] == 0
                && plan
                    .factors
                    .iter()
                    .flatten()
                    .all(|f| isometry_residual(&f.v, &f.target) <= tol.isometry * f.target.max_abs());
            if preserving {
                b.check("norm_relative_change", relative(before, after), 1e-10);
            }
            let mut result = json!({
                "base_cells": plan.cells,
                "spacetime_cells": plan.offset,
                "base_shift": plan.base_shift().delta,
                "reference": {
                    "v": io::matrix_json(&plan.reference.v),
                    "delta": io::matrix_json(&plan.reference.delta),
                    "u": io::matrix_json(&plan.reference.u),
                },
                "total_norm": { "before": before, "after": after },
            });
            emit_field(&mut result, "field", io::fiber_field_json(&moved), out.as_deref())?;
            Ok(b.finish(result))
        }
        Command::Aggregate { field } => {
            let mut b = Builder::new("aggregate", overrides);
            let psi = io::parse_fiber_field(&b.read("field", field)?)?;
            Ok(b.finish(json!({
                "base_cell_volume": psi.base.cell_volume(),
                "field": io::spinor_field_json(&aggregate(&psi)),
            })))
        }
        Command::LieFrw { scale, h, p, c, t1, t2, field, out } => {
            let mut b = Builder::new("lie-frw", overrides);
            let psi = io::parse_fiber_field(&b.read("field", field)?)?;
            let scale = match scale {
                ScaleKind::Exp => ScaleFactor::Exp { h: *h },
                ScaleKind::Power => ScaleFactor::Power { p: *p },
                ScaleKind::Constant => ScaleFactor::Constant { c: *c },
            };
            let spacing = spatial_spacing(&psi.base)?;
            let snap = snap_t2(&scale, *t1, *t2, spacing)?;
            let motion = frw_motion(&scale, *t1, snap.t2)?;
            let plan = TransportPlan::new(&psi, &motion, &DiagonalMetric::minkowski(), &tol)?;
            let moved = plan.apply(&psi)?;
            let derivative = frw_lie_operator(&psi)?;
            b.check("norm_relative_change", relative(total_norm(&psi), total_norm(&moved)), 1e-14);

            let (e, _) = frw_tetrad(&scale, &psi.spacetime)?;
            let omega = spin_connection(&e)?;
            let ht = psi.spacetime.axes[0].spacing;
            let block = omega
                .field
                .values
                .iter()
                .enumerate()
                .map(|(i, w)| (w[0] - frw_generator(&scale, psi.spacetime.coordinates(i)[0])).amax())
                .fold(0.0, f64::max);
            b.check("generator_vs_connection", block / (ht * ht), 10.0);

            let mut result = json!({
                "scale": scale,
                "snap": snap,
                "motion": io::motion_json(&motion),
                "base_cells": plan.cells,
                "spacetime_cells": plan.offset,
            });
            let fields = json!({
                "transported": io::fiber_field_json(&moved),
                "lie_derivative": io::fiber_field_json(&derivative),
            });
            emit_field(&mut result, "fields", fields, out.as_deref())?;
            Ok(b.finish(result))
        }
        Command::Selftest => {
            let mut b = Builder::new("selftest", overrides);
            let checks = crate::selftest::run_with(&|name, default| overrides.get(name, default));
            for c in &checks {
                b.residuals.insert(c.name.clone(), c.residual);
                b.tolerances.insert(c.name.clone(), c.tolerance);
            }
            Ok(b.finish(json!({ "checks": checks })))
        }
    }
}

fn relative(before: f64, after: f64) -> f64 {
    let diff = (after - before).abs();
    if before == 0.0 {
        diff
    } else {
        diff / before.abs()
    }
}

/// Spacing shared by the spatial base axes that have more than one sample.
fn spatial_spacing(base: &BaseGrid) -> Result<f64, Error> {
    let spacings: Vec<f64> = (1..4).filter(|&k| base.axes[k].len > 1).map(|k| base.axes[k].spacing).collect();
    match spacings.first() {
        None => Ok(base.axes[1].spacing),
        Some(&s) if spacings.iter().all(|x| (x - s).abs() <= 1e-12 * s) => Ok(s),
        _ => Err(Error::InvalidGrid("spatial base axes need a common spacing".into())),
    }
}

/// Writes `value` to `path` when given, else embeds it in `result[key]`.
fn emit_field(result: &mut Value, key: &str, value: Value, path: Option<&Path>) -> Result<(), Error> {
    match path {
        Some(p) => {
            let text = serde_json::to_string(&value).expect("json");
            std::fs::write(p, text).map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
            result[key] = json!({ "written_to": p.display().to_string() });
        }
        None => result[key] = value,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("spinfiber").chain(args.iter().copied()).map(String::from).collect();
        let code = run_to(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn named_tolerances_are_extracted() {
        let argv = ["x", "--tol-isometry", "1e-3", "selftest", "--tol-clifford-closure=2"].map(String::from).to_vec();
        let (rest, named) = extract_named_tolerances(argv).unwrap();
        assert_eq!(rest, vec!["x", "selftest"]);
        assert_eq!(named["isometry"], 1e-3);
        assert_eq!(named["clifford_closure"], 2.0);
        assert!(extract_named_tolerances(vec!["--tol-x".into()]).is_err());
    }

    #[test]
    fn override_precedence() {
        let o = Overrides {
            global: Some(1e-6),
            named: BTreeMap::from([("lattice".to_string(), 1e-3)]),
        };
        assert_eq!(o.get("anything", 1.0), 1e-6);
        assert_eq!(o.tolerances().lattice, 1e-3);
        assert_eq!(Overrides::default().get("x", 0.5), 0.5);
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let (code, out, err) = run_args(&["frobnicate"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(!err.is_empty());
    }

    #[test]
    fn missing_file_is_input_error() {
        let (code, _, err) = run_args(&["gamma", "--metric", "/nonexistent/m.json"]);
        assert_eq!(code, 2);
        assert!(err.contains("error"));
    }

    #[test]
    fn selftest_failing_tolerance_exits_one() {
        let (code, out, _) = run_args(&["selftest", "--tol-clifford-closure", "-1"]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["status"], "fail");
    }
}
