use nalgebra::Vector4;

use spinfiber::clifford::Spinor;
use spinfiber::fiber::{total_norm, transport, BaseGrid, FiberSpinorField, FrameMap};
use spinfiber::frw::{frw_generator, frw_lie_operator, frw_lie_interior, frw_motion, frw_tetrad, FrwFrame, ScaleFactor};
use spinfiber::geometry::{
    lie_derivative_tetrad, spin_connection, transported_frame, Axis, ChartBounds, ChartGrid, ConstantField, FrameField,
    VectorSource,
};
use spinfiber::mat4::{mat_log, Complex64, Matrix4R};
use spinfiber::metric::DiagonalMetric;

fn t_grid(t0: f64, h: f64, n: usize) -> ChartGrid {
    ChartGrid::new([Axis::new(t0, h, n).unwrap(), Axis::single(0.0), Axis::single(0.0), Axis::single(0.0)])
}

fn cube(origin: f64, s: f64, n: usize) -> BaseGrid {
    let a = Axis::new(origin, s, n).unwrap();
    BaseGrid::new([Axis::single(0.0), a, a, a])
}

fn max_diff(a: &FiberSpinorField, b: &FiberSpinorField) -> f64 {
    a.values.iter().zip(&b.values).map(|(p, q)| (p.0 - q.0).camax()).fold(0.0, f64::max)
}

#[test]
fn transport_is_additive_in_time() {
    let h = 0.1;
    let scale = ScaleFactor::Exp { h };
    let ht = 0.25;
    let s = 2.0 * h * ht; // one base cell per time step
    let st = t_grid(0.0, ht, 9);
    let base = cube(-0.2, s, 9);
    let field = FiberSpinorField::from_fn(st, base, |x, d| {
        // Keep the longest hop (five cells) inside the base grid.
        if x[0] < 0.6 && d.log_abs[1..].iter().all(|l| *l < -0.04) {
            Spinor::new([
                Complex64::new(1.0 + x[0], d.log_abs[1]),
                Complex64::new(0.5 * d.log_abs[2], 0.25),
                Complex64::new(0.1, -x[0]),
                Complex64::new(d.log_abs[3], 0.0),
            ])
        } else {
            Spinor::zero()
        }
    });
    let eta = DiagonalMetric::minkowski();
    for (t1, t2, t3) in [(0.0, 0.5, 1.0), (0.0, 0.25, 1.25), (0.5, 0.75, 1.5)] {
        let stepwise = transport(&transport(&field, &frw_motion(&scale, t1, t2).unwrap(), &eta).unwrap(), &frw_motion(&scale, t2, t3).unwrap(), &eta).unwrap();
        let direct = transport(&field, &frw_motion(&scale, t1, t3).unwrap(), &eta).unwrap();
        assert!(max_diff(&stepwise, &direct) <= 1e-12);
        assert!((total_norm(&direct) - total_norm(&field)).abs() <= 1e-14 * total_norm(&field).abs());
    }
}

#[test]
fn power_law_transport_is_additive() {
    let p = 2.0;
    let scale = ScaleFactor::Power { p };
    let s = 0.1;
    // Times with 2·p·ln(t) on the lattice, so every hop is aligned in the base.
    let t = |k: i32| (k as f64 * s / (2.0 * p)).exp();
    let (t1, t2, t3) = (t(0), t(1), t(3));
    let base = cube(-0.3, s, 9);
    let st = ChartGrid::point([t1, 0.0, 0.0, 0.0]);
    let field = FiberSpinorField::from_fn(st, base, |_, d| {
        if d.log_abs[1..].iter().all(|l| *l < 0.01) { Spinor::from_real([1.0, d.log_abs[1], d.log_abs[2], d.log_abs[3]]) } else { Spinor::zero() }
    });
    let eta = DiagonalMetric::minkowski();
    // A one-point time axis cannot carry the time translation, so compare the base action only.
    let strip = |mut m: spinfiber::fiber::MotionSpec| {
        m.map = spinfiber::fiber::SpacetimeMap::Identity;
        m
    };
    let stepwise = transport(&transport(&field, &strip(frw_motion(&scale, t1, t2).unwrap()), &eta).unwrap(), &strip(frw_motion(&scale, t2, t3).unwrap()), &eta).unwrap();
    let direct = transport(&field, &strip(frw_motion(&scale, t1, t3).unwrap()), &eta).unwrap();
    assert!(max_diff(&stepwise, &direct) <= 1e-12);
}

/// `ψ = ψ₀·sin(t)·e^{ℓ₁/2}·cos(ℓ₂)·(1 + ℓ₃²)`.
fn separable(t: f64, l: [f64; 4]) -> (f64, f64) {
    let g = (0.5 * l[1]).exp() * l[2].cos() * (1.0 + l[3] * l[3]);
    let dg = (0.5 * l[1]).exp() * (0.5 * l[2].cos() * (1.0 + l[3] * l[3]) - l[2].sin() * (1.0 + l[3] * l[3]) + l[2].cos() * 2.0 * l[3]);
    (t.sin() * g, t.cos() * g + t.sin() * dg)
}

#[test]
fn lie_operator_converges_at_second_order() {
    let psi0 = Spinor::new([Complex64::new(1.0, 0.5), Complex64::new(-0.25, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.3, -0.3)]);
    let (t0, l0) = (0.7, 0.1);
    let mut errors = Vec::new();
    for level in 0..3 {
        let h = 0.1 / 2f64.powi(level);
        let st = t_grid(t0 - 2.0 * h, h, 5);
        let base = cube(l0 - 2.0 * h, h, 5);
        let field = FiberSpinorField::from_fn(st, base, |x, d| psi0 * separable(x[0], d.log_abs).0);
        let out = frw_lie_operator(&field).unwrap();
        let (x, d) = (2, base.index([0, 2, 2, 2]));
        assert!(frw_lie_interior(&out, x, d));
        let exact = psi0 * separable(t0, [0.0, l0, l0, l0]).1;
        errors.push((out.get(x, d).0 - exact.0).camax());
    }
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.9, "order {order} from {errors:?}");
    }
}

#[test]
fn flow_generator_matches_connection_block() {
    let hubble = 0.4;
    let scale = ScaleFactor::Exp { h: hubble };
    let h = 0.01;
    let grid = t_grid(0.0, h, 11);
    let (e, _) = frw_tetrad(&scale, &grid).unwrap();
    let omega = spin_connection(&e).unwrap();
    let (t1, t2) = (0.2, 0.7);
    let t = match frw_motion(&scale, t1, t2).unwrap().frames {
        FrameMap::Uniform(t) => t,
        FrameMap::PerPoint(_) => unreachable!(),
    };
    let generator = mat_log(&t).unwrap() / (t2 - t1);
    assert!((generator - frw_generator(&scale, t1)).amax() <= 1e-12);
    for w in &omega.field.values {
        assert!((w[0] - generator).amax() <= 10.0 * h * h + 1e-12);
        assert_eq!(w[1], Matrix4R::zeros());
    }
}

#[test]
fn lie_derivative_along_time_is_scale_rate() {
    let scale = ScaleFactor::Power { p: 0.5 };
    let h = 0.01;
    let grid = t_grid(1.0, h, 11);
    let (e, _) = frw_tetrad(&scale, &grid).unwrap();
    let dt = ConstantField(Vector4::new(1.0, 0.0, 0.0, 0.0));
    let sampled = lie_derivative_tetrad(&e, VectorSource::Analytic(&dt)).unwrap();
    let frame = FrwFrame(scale);
    for (i, l) in sampled.values.iter().enumerate() {
        let t = grid.coordinates(i)[0];
        let rate = scale.derivative(t);
        let expected = Matrix4R::from_diagonal(&Vector4::new(0.0, rate, rate, rate));
        assert!((l - expected).amax() <= 10.0 * h * h, "t={t}");
        assert!((frame.lie_derivative(&dt, &[t, 0.0, 0.0, 0.0]) - expected).amax() <= 1e-15);
    }
}

#[test]
fn time_flow_scales_the_spatial_frame() {
    let hubble = 0.3;
    let frame = FrwFrame(ScaleFactor::Exp { h: hubble });
    let dt = ConstantField(Vector4::new(1.0, 0.0, 0.0, 0.0));
    let (t1, t2) = (0.25, 1.75);
    let flow = transported_frame(&dt, &frame, [t1, 0.0, 0.0, 0.0], t2 - t1, &ChartBounds::unbounded()).unwrap();
    let r = (hubble * (t2 - t1)).exp();
    let expected = Matrix4R::from_diagonal(&Vector4::new(1.0, r, r, r));
    assert!((flow.frame_map - expected).amax() <= 1e-8);
    assert!((flow.endpoint[0] - t2).abs() <= 1e-12);
}
