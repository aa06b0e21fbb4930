//! Invariant checks on built-in fixtures.
//!
//! Fixtures are deterministic (low-discrepancy sequences, no RNG), so every
//! run reports identical residuals.

use std::time::Instant;

use nalgebra::Vector4;
use serde::Serialize;

use crate::clifford::{deformed_gammas, Spinor};
use crate::decompose::factorize_with;
use crate::fiber::{aggregate, total_norm, transport_with, BaseGrid, FiberSpinorField, MotionSpec, SpacetimeMap, TransportPlan};
use crate::frw::{frw_generator, frw_lie_operator, frw_motion, frw_tetrad, ScaleFactor};
use crate::geometry::{flow_exponentiate, spin_connection, Axis, ChartBounds, ChartGrid, LinearField};
use crate::mat4::{mat_exp, Complex64, Matrix4R};
use crate::metric::DiagonalMetric;
use crate::spinlift::{intertwining_residual, lift_exp, IsometryGenerator};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Point `k` of a 4-dimensional Kronecker sequence in `[0, 1)⁴`.
fn sequence(k: usize) -> [f64; 4] {
    const ALPHA: [f64; 4] = [0.569_840_290_998_053_3, 0.324_717_957_244_746, 0.754_877_666_246_693, 0.866_025_403_784_438_6];
    ALPHA.map(|a| (0.5 + a * k as f64).fract())
}

fn symmetric(k: usize, width: f64) -> [f64; 4] {
    sequence(k).map(|u| width * (2.0 * u - 1.0))
}

struct Suite<'a> {
    tol: &'a dyn Fn(&str, f64) -> f64,
    checks: Vec<Check>,
}

impl Suite<'_> {
    fn record(&mut self, name: &str, residual: f64, default: f64) {
        let tolerance = (self.tol)(name, default);
        self.checks.push(Check {
            name: name.to_string(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        });
    }

    fn record_result(&mut self, name: &str, value: crate::Result<f64>, default: f64) {
        self.record(name, value.unwrap_or(f64::INFINITY), default);
    }
}

/// Runs every check with default tolerances.
pub fn run() -> Vec<Check> {
    run_with(&|_, default| default)
}

/// Runs every check, asking `tol(name, default)` for each tolerance.
pub fn run_with(tol: &dyn Fn(&str, f64) -> f64) -> Vec<Check> {
    let mut suite = Suite { tol, checks: Vec::new() };
    let tolerances = Tolerances::default();

    // Clifford closure, relative to the largest metric entry.
    let mut worst = 0.0f64;
    for k in 0..500 {
        let d = DiagonalMetric::lorentzian(symmetric(k, 3.0));
        worst = worst.max(match deformed_gammas(&d) {
            Ok(rep) => rep.anticommutator_residual() / d.max_abs(),
            Err(_) => f64::INFINITY,
        });
    }
    suite.record("clifford_closure", worst, 1e-12);

    // Factorization of near-identity transforms.
    let (mut recon, mut right, mut det, mut shift) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..500 {
        let d = DiagonalMetric::lorentzian(symmetric(3 * k, 3.0));
        let t = Matrix4R::identity() + Matrix4R::from_fn(|i, j| 0.1 * symmetric(4 * k + i + 1, 1.0)[j]);
        match factorize_with(&t, &d, &tolerances) {
            Ok(f) => {
                let r = f.residuals(&t);
                recon = recon.max(r.reconstruction / t.norm());
                right = right.max(r.right_isometry / d.max_abs());
                det = det.max(r.det_v);
                let moved = d.shift(&f.base_shift);
                shift = shift.max((0..4).map(|i| (moved.log_abs[i] - f.target.log_abs[i]).abs()).fold(0.0, f64::max));
            }
            Err(_) => recon = f64::INFINITY,
        }
    }
    suite.record("factorization_reconstruction", recon, 1e-10);
    suite.record("factorization_right_isometry", right, 1e-10);
    suite.record("factorization_det_v", det, 1e-10);
    suite.record("factorization_target_shift", shift, 1e-12);

    // Spin lift intertwining and norm preservation at deformed base points.
    let (mut inter, mut norm) = (0.0f64, 0.0f64);
    for k in 0..200 {
        let d = DiagonalMetric::lorentzian(symmetric(5 * k, 3.0));
        let a = Matrix4R::from_fn(|i, j| symmetric(7 * k + i, 1.0)[j]);
        let raised = (a - a.transpose()) * 0.25;
        let lambda = IsometryGenerator::from_raised(&raised, d);
        let l = lambda.exp();
        let rep = deformed_gammas(&d).expect("lorentzian");
        match lift_exp(&lambda) {
            Ok(s) => {
                inter = inter.max(intertwining_residual(&s.matrix, &l, &rep).unwrap_or(f64::INFINITY));
                let psi = Spinor::from_real(sequence(k));
                let before = crate::clifford::norm_density(&rep, &psi);
                let after = crate::clifford::norm_density(&rep, &psi.apply(&s.matrix));
                norm = norm.max((after - before).abs() / psi.0.norm_squared().max(1.0));
            }
            Err(_) => inter = f64::INFINITY,
        }
    }
    suite.record("lift_intertwining", inter, 1e-9);
    suite.record("lift_norm_density", norm, 1e-10);

    let full_turn = IsometryGenerator::rotation(1, 2, 2.0 * std::f64::consts::PI, DiagonalMetric::minkowski());
    suite.record_result(
        "lift_double_cover",
        lift_exp(&full_turn).map(|s| (s.matrix + crate::mat4::Matrix4C::identity()).camax()),
        1e-10,
    );

    // FRW connection against Ṙ/R.
    let scale = ScaleFactor::Exp { h: 0.3 };
    let h = 0.01;
    let grid = ChartGrid::new([Axis::new(0.0, h, 21).expect("axis"), Axis::single(0.0), Axis::single(0.0), Axis::single(0.0)]);
    let omega_error = frw_tetrad(&scale, &grid).and_then(|(e, _)| spin_connection(&e)).map(|omega| {
        omega
            .field
            .values
            .iter()
            .enumerate()
            .map(|(i, w)| (w[0] - frw_generator(&scale, grid.coordinates(i)[0])).amax())
            .fold(0.0, f64::max)
    });
    suite.record_result("frw_connection", omega_error.map(|e| e / (h * h)), 10.0);

    // Flow of a linear field against the matrix exponential.
    let m = Matrix4R::from_fn(|i, j| 0.3 * symmetric(11 + i, 1.0)[j]);
    let flow = flow_exponentiate(&LinearField(m), [0.2, -0.1, 0.3, 0.05], 1.0, &ChartBounds::unbounded())
        .map(|r| (r.frame_map - mat_exp(&m)).amax());
    suite.record_result("flow_exponential", flow, 1e-8);

    // Fiber transport: permutation, norm, step composition.
    let s = 0.1;
    let st = ChartGrid::new([Axis::new(0.0, 0.5, 4).expect("axis"), Axis::single(0.0), Axis::single(0.0), Axis::single(0.0)]);
    let cube = Axis::new(-0.3, s, 7).expect("axis");
    let base = BaseGrid::new([Axis::single(0.0), cube, cube, cube]);
    let field = FiberSpinorField::from_fn(st, base, |x, d| {
        if x[0] < 0.75 && d.log_abs[1..].iter().all(|l| l.abs() < 0.15) {
            Spinor::new([
                Complex64::new(1.0 + x[0] + d.log_abs[1], 0.3),
                Complex64::new(0.5, -d.log_abs[2]),
                Complex64::new(0.2 * d.log_abs[3], 0.0),
                Complex64::new(0.0, 0.1),
            ])
        } else {
            Spinor::zero()
        }
    });
    let eta = DiagonalMetric::minkowski();
    let r = (s / 2.0).exp();
    let dilatation = MotionSpec::uniform(
        Matrix4R::from_diagonal(&Vector4::new(1.0, r, r, r)),
        SpacetimeMap::Translate([0.5, 0.0, 0.0, 0.0]),
    );
    let permutation = transport_with(&field, &dilatation, &eta, &tolerances).map(|out| {
        let mut a: Vec<String> = field.values.iter().map(|v| format!("{v:?}")).collect();
        let mut b: Vec<String> = out.values.iter().map(|v| format!("{v:?}")).collect();
        a.sort();
        b.sort();
        let norm = (total_norm(&out) - total_norm(&field)).abs() / total_norm(&field).abs();
        (if a == b { 0.0 } else { 1.0 }, norm)
    });
    suite.record_result("transport_permutation", permutation.clone().map(|p| p.0), 0.0);
    suite.record_result("transport_norm_dilatation", permutation.map(|p| p.1), 1e-14);

    let bitwise = TransportPlan::new(&field, &dilatation, &eta, &tolerances).and_then(|plan| {
        let steps = plan.left_step(&plan.translate_step(&plan.right_step(&field)?)?)?;
        Ok(if steps == plan.apply(&field)? { 0.0 } else { 1.0 })
    });
    suite.record_result("transport_step_composition", bitwise, 0.0);

    // FRW additivity over the same field.
    let frw = ScaleFactor::Exp { h: 0.1 };
    let frw_st = ChartGrid::new([Axis::new(0.0, 0.5, 6).expect("axis"), Axis::single(0.0), Axis::single(0.0), Axis::single(0.0)]);
    let frw_field = FiberSpinorField::from_fn(frw_st, base, |x, d| if x[0] < 0.75 { *field.get(0, base.locate(d, &tolerances).expect("lattice")) } else { Spinor::zero() });
    let additivity = (|| {
        let step = |a: f64, b: f64, f: &FiberSpinorField| transport_with(f, &frw_motion(&frw, a, b)?, &eta, &tolerances);
        let two = step(0.5, 1.0, &step(0.0, 0.5, &frw_field)?)?;
        let one = step(0.0, 1.0, &frw_field)?;
        Ok(two.values.iter().zip(&one.values).map(|(a, b)| (a.0 - b.0).camax()).fold(0.0, f64::max))
    })();
    suite.record_result("frw_additivity", additivity, 1e-12);

    // The Lie operator is exact on linear fields.
    let psi0 = Spinor::from_real([1.0, -0.5, 0.25, 2.0]);
    let linear = FiberSpinorField::from_fn(frw_st, base, |x, d| psi0 * (x[0] + d.log_abs[1] + d.log_abs[2] + d.log_abs[3]));
    let lie = frw_lie_operator(&linear).map(|out| out.values.iter().map(|v| (v.0 - (psi0 * 4.0).0).camax()).fold(0.0, f64::max));
    suite.record_result("frw_lie_linear", lie, 1e-12);

    // Aggregation: single support and uniform field.
    let single_base = BaseGrid::new([Axis::single(0.0), Axis::new(0.0, 0.25, 3).expect("axis"), Axis::new(0.0, 0.5, 2).expect("axis"), Axis::single(0.0)]);
    let point = ChartGrid::point([0.0; 4]);
    let mut single = FiberSpinorField::zeros(point, single_base);
    single.set(0, 4, psi0);
    let cell = single_base.cell_volume();
    let single_error = (aggregate(&single).values[0].0 - (psi0 * cell).0).camax() / psi0.0.camax();
    let uniform = FiberSpinorField::from_fn(point, single_base, |_, _| psi0);
    let uniform_error = (aggregate(&uniform).values[0].0 - (psi0 * (6.0 * cell)).0).camax() / (6.0 * cell * psi0.0.camax());
    suite.record("aggregate_quadrature", single_error.max(uniform_error), 1e-14);

    suite.checks
}

/// Runs the suite and returns it with its wall-clock duration in seconds.
pub fn run_timed(tol: &dyn Fn(&str, f64) -> f64) -> (Vec<Check>, f64) {
    let start = Instant::now();
    let checks = run_with(tol);
    (checks, start.elapsed().as_secs_f64())
}
