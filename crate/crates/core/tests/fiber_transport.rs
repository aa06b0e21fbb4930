use nalgebra::Vector4;
use proptest::prelude::*;

use spinfiber::clifford::{deformed_gammas, Spinor};
use spinfiber::decompose::{factorize, IsometryFactorization};
use spinfiber::fiber::{
    aggregate, step_left_isometry, step_right_isometry, step_translate, total_norm, transport, BaseGrid,
    FiberSpinorField, FrameMap, MotionSpec, SpacetimeMap, TransportPlan,
};
use spinfiber::geometry::{Axis, ChartGrid};
use spinfiber::mat4::{mat_exp, mat_log, Complex64, Matrix4C, Matrix4R};
use spinfiber::metric::{BaseShift, DiagonalMetric};
use spinfiber::spinlift::lift_isometry;
use spinfiber::tolerance::Tolerances;
use spinfiber::Error;

const S: f64 = 0.1;

fn cube_base(n: usize) -> BaseGrid {
    let axis = Axis::new(-((n / 2) as f64) * S, S, n).unwrap();
    BaseGrid::new([Axis::single(0.0), axis, axis, axis])
}

fn time_grid(n: usize) -> ChartGrid {
    ChartGrid::new([Axis::new(0.0, 0.5, n).unwrap(), Axis::single(0.0), Axis::single(0.0), Axis::single(0.0)])
}

fn rotation_z(theta: f64) -> Matrix4R {
    let mut r = Matrix4R::identity();
    r[(1, 1)] = theta.cos();
    r[(2, 2)] = theta.cos();
    r[(1, 2)] = -theta.sin();
    r[(2, 1)] = theta.sin();
    r
}

fn spinor(seed: f64) -> Spinor {
    Spinor::new([
        Complex64::new(1.0 + 0.3 * seed.sin(), 0.2 * seed),
        Complex64::new(0.4 * (2.0 * seed).cos(), -0.1),
        Complex64::new(0.2 * seed.cos(), 0.05 * seed),
        Complex64::new(0.0, 0.3 * (3.0 * seed).sin()),
    ])
}

/// Nonzero only on base points within `radius` cells of the center.
fn compact_field(st: ChartGrid, base: BaseGrid, radius: f64) -> FiberSpinorField {
    FiberSpinorField::from_fn(st, base, |x, d| {
        if d.log_abs[1..].iter().all(|l| l.abs() <= radius * S + 1e-12) {
            spinor(1.0 + x[0] + 3.0 * d.log_abs[1] - 2.0 * d.log_abs[2] + 5.0 * d.log_abs[3])
        } else {
            Spinor::zero()
        }
    })
}

fn sorted_values(f: &FiberSpinorField) -> Vec<[u64; 8]> {
    let mut v: Vec<[u64; 8]> = f
        .values
        .iter()
        .map(|s| std::array::from_fn(|i| if i % 2 == 0 { s.0[i / 2].re.to_bits() } else { s.0[i / 2].im.to_bits() }))
        .collect();
    v.sort();
    v
}

fn dilatation(cells: [i64; 3]) -> Matrix4R {
    let r = |c: i64| (c as f64 * S / 2.0).exp();
    Matrix4R::from_diagonal(&Vector4::new(1.0, r(cells[0]), r(cells[1]), r(cells[2])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn aligned_dilatations_permute_samples(c1 in -1i64..=1, c2 in -1i64..=1, c3 in -1i64..=1) {
        let base = cube_base(5);
        let field = compact_field(time_grid(2), base, 1.0);
        let out = transport(&field, &MotionSpec::uniform(dilatation([c1, c2, c3]), SpacetimeMap::Identity), &DiagonalMetric::minkowski()).unwrap();
        prop_assert_eq!(sorted_values(&out), sorted_values(&field));
        let (a, b) = (total_norm(&field), total_norm(&out));
        prop_assert!((a - b).abs() <= 1e-14 * a.abs());
        for x in 0..field.spacetime.len() {
            for d in 0..base.len() {
                if let Some(t) = base.offset(base.multi_index(d), [0, c1, c2, c3]) {
                    prop_assert_eq!(out.get(x, base.index(t)), field.get(x, d));
                }
            }
        }
    }

    #[test]
    fn transport_matches_explicit_steps_bitwise(theta in -0.6f64..0.6, c in -1i64..=1) {
        let base = cube_base(5);
        let field = compact_field(time_grid(3), base, 1.0);
        let motion = MotionSpec::uniform(rotation_z(theta) * dilatation([c, c, c]), SpacetimeMap::Translate([0.5, 0.0, 0.0, 0.0]));
        let field = FiberSpinorField::from_fn(field.spacetime, base, |x, d| {
            if x[0] < 1.0 { *field.get(0, base.locate(d, &Tolerances::default()).unwrap()) } else { Spinor::zero() }
        });
        let plan = TransportPlan::new(&field, &motion, &DiagonalMetric::minkowski(), &Tolerances::default()).unwrap();
        let steps = plan.left_step(&plan.translate_step(&plan.right_step(&field).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(steps, transport(&field, &motion, &DiagonalMetric::minkowski()).unwrap());
    }

    #[test]
    fn identity_factorization_steps_are_exact(seed in 0.0f64..10.0, at in 0usize..125) {
        let base = cube_base(5);
        let field = FiberSpinorField::from_fn(time_grid(2), base, |x, d| spinor(seed + x[0] + d.log_abs[1] - d.log_abs[3]));
        let f = IsometryFactorization::identity(&base.metric(at));
        prop_assert_eq!(&step_right_isometry(&field, &f).unwrap(), &field);
        prop_assert_eq!(&step_left_isometry(&field, &f).unwrap(), &field);
        prop_assert_eq!(&transport(&field, &MotionSpec::identity(), &base.metric(at)).unwrap(), &field);
    }
}

#[test]
fn single_base_point_steps_agree_with_plan() {
    let d = DiagonalMetric::lorentzian([0.0, 0.2, 0.2, -0.1]);
    let base = BaseGrid::single(&d).unwrap();
    let field = FiberSpinorField::from_fn(time_grid(3), base, |x, _| spinor(x[0]));
    let t = rotation_z(0.45);
    let f = factorize(&t, &d).unwrap();
    let explicit = step_left_isometry(
        &step_translate(&step_right_isometry(&field, &f).unwrap(), &f.base_shift, &SpacetimeMap::Identity).unwrap(),
        &f,
    )
    .unwrap();
    let planned = transport(&field, &MotionSpec::uniform(t, SpacetimeMap::Identity), &d).unwrap();
    assert_eq!(explicit, planned);
}

/// Independent oracle for the lift of an arbitrary matrix generator at `d`:
/// `(i/4)·Σ λ^k_m·(1/d_k)·σ^{mk}(d)` with `σ^{mk} = (i/2)[γ^m, γ^k]`.
fn oracle_lift(m: &Matrix4R, d: &DiagonalMetric) -> Matrix4C {
    let lambda = mat_log(m).unwrap();
    let gammas = deformed_gammas(d).unwrap().gammas;
    let entries = d.entries();
    let mut sum = Matrix4C::zeros();
    for k in 0..4 {
        for mu in 0..4 {
            let sigma = (gammas[mu] * gammas[k] - gammas[k] * gammas[mu]) * Complex64::new(0.0, 0.5);
            sum += sigma * Complex64::new(lambda[(k, mu)] / entries[k], 0.0);
        }
    }
    mat_exp(&(sum * Complex64::new(0.0, 0.25)))
}

#[test]
fn rotation_with_dilatation_preserves_norm_where_v_is_an_isometry() {
    let base = cube_base(5);
    let st = time_grid(2);
    // Support on the ℓ₁ = ℓ₂ diagonal, where the rotation is an isometry of every base point.
    let field = FiberSpinorField::from_fn(st, base, |x, d| {
        let l = d.log_abs;
        if (l[1] - l[2]).abs() < 1e-12 && l[1].abs() <= S + 1e-12 && l[3].abs() <= S + 1e-12 {
            spinor(x[0] + 4.0 * l[1] + 7.0 * l[3])
        } else {
            Spinor::zero()
        }
    });
    let t = rotation_z(0.3) * dilatation([1, 1, 1]);
    let motion = MotionSpec::uniform(t, SpacetimeMap::Identity);
    let plan = TransportPlan::new(&field, &motion, &DiagonalMetric::minkowski(), &Tolerances::default()).unwrap();
    assert_eq!(plan.cells, [0, 1, 1, 1]);
    let out = plan.apply(&field).unwrap();
    let (a, b) = (total_norm(&field), total_norm(&out));
    assert!((a - b).abs() <= 1e-10 * a.abs(), "{a} vs {b}");
}

#[test]
fn generic_orthogonal_v_matches_generator_oracle() {
    let base = cube_base(5);
    let st = ChartGrid::point([0.0; 4]);
    let field = compact_field(st, base, 1.0);
    let t = rotation_z(0.3) * dilatation([1, 1, 1]);
    let motion = MotionSpec::uniform(t, SpacetimeMap::Identity);
    let plan = TransportPlan::new(&field, &motion, &DiagonalMetric::minkowski(), &Tolerances::default()).unwrap();
    let out = plan.apply(&field).unwrap();
    let mut checked = 0;
    for d in 0..base.len() {
        let Some(target) = base.offset(base.multi_index(d), plan.cells) else { continue };
        let target = base.index(target);
        let f = &plan.factors[0][d];
        let u_lift = lift_isometry(&f.u, &base.metric(d)).unwrap().matrix;
        let expected = field.get(0, d).apply(&u_lift).apply(&oracle_lift(&f.v, &base.metric(target)));
        assert!((out.get(0, target).0 - expected.0).camax() <= 1e-12);
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn per_point_rotations_act_fiberwise() {
    let base = BaseGrid::new([Axis::single(0.0), Axis::single(0.2), Axis::single(0.2), Axis::new(-0.1, 0.1, 3).unwrap()]);
    let st = time_grid(4);
    let field = FiberSpinorField::from_fn(st, base, |x, d| spinor(x[0] - d.log_abs[3]));
    let angles: Vec<f64> = (0..st.len()).map(|i| 0.2 + 0.3 * i as f64).collect();
    let motion = MotionSpec {
        map: SpacetimeMap::Identity,
        frames: FrameMap::PerPoint(angles.iter().map(|a| rotation_z(*a)).collect()),
    };
    let out = transport(&field, &motion, &base.metric(0)).unwrap();
    for x in 0..st.len() {
        for d in 0..base.len() {
            let s = lift_isometry(&rotation_z(angles[x]), &base.metric(d)).unwrap().matrix;
            assert!((out.get(x, d).0 - field.get(x, d).apply(&s).0).camax() <= 1e-12);
        }
    }
    assert!((total_norm(&out) - total_norm(&field)).abs() <= 1e-10 * total_norm(&field).abs());
}

#[test]
fn disjoint_supports_transport_independently() {
    let base = cube_base(7);
    let st = time_grid(2);
    let left = FiberSpinorField::from_fn(st, base, |x, d| {
        if d.log_abs[1] <= -0.2 + 1e-12 && d.log_abs[1] >= -0.25 && d.log_abs[2].abs() < 0.15 && d.log_abs[3].abs() < 0.15 {
            spinor(x[0] + d.log_abs[2])
        } else {
            Spinor::zero()
        }
    });
    let right = FiberSpinorField::from_fn(st, base, |x, d| {
        if d.log_abs[1] >= 0.1 - 1e-12 && d.log_abs[1] <= 0.15 && d.log_abs[2].abs() < 0.15 && d.log_abs[3].abs() < 0.15 {
            spinor(2.0 - x[0] + d.log_abs[3])
        } else {
            Spinor::zero()
        }
    });
    let one = Complex64::new(1.0, 0.0);
    let eta = DiagonalMetric::minkowski();
    let m1 = MotionSpec::uniform(dilatation([1, 0, -1]), SpacetimeMap::Identity);
    let m2 = MotionSpec::uniform(dilatation([-1, 1, 0]), SpacetimeMap::Identity);

    // Each motion applied to its own region, in either order, leaves the same combined field.
    let a_then_b = transport(&left, &m1, &eta).unwrap().combine(one, &transport(&right, &m2, &eta).unwrap(), one).unwrap();
    let b_then_a = transport(&right, &m2, &eta).unwrap().combine(one, &transport(&left, &m1, &eta).unwrap(), one).unwrap();
    let diff = a_then_b.values.iter().zip(&b_then_a.values).map(|(p, q)| (p.0 - q.0).camax()).fold(0.0, f64::max);
    assert!(diff <= 1e-14);

    // A motion applied to the sum equals the sum of the motions applied separately.
    let sum = left.combine(one, &right, one).unwrap();
    let together = transport(&sum, &m1, &eta).unwrap();
    let apart = transport(&left, &m1, &eta).unwrap().combine(one, &transport(&right, &m1, &eta).unwrap(), one).unwrap();
    let diff = together.values.iter().zip(&apart.values).map(|(p, q)| (p.0 - q.0).camax()).fold(0.0, f64::max);
    assert!(diff <= 1e-14);
    let supp_l = transport(&left, &m1, &eta).unwrap().base_support();
    let supp_r = transport(&right, &m1, &eta).unwrap().base_support();
    assert!(supp_l.iter().all(|d| !supp_r.contains(d)));
}

#[test]
fn aggregation_is_linear_and_exact() {
    let base = cube_base(5);
    let st = time_grid(3);
    let f = compact_field(st, base, 2.0);
    let g = FiberSpinorField::from_fn(st, base, |x, d| spinor(-x[0] + d.log_abs[2]));
    let (a, b) = (Complex64::new(0.5, -2.0), Complex64::new(-1.25, 0.75));
    let combined = aggregate(&f.combine(a, &g, b).unwrap());
    let separate: Vec<Spinor> = aggregate(&f).values.iter().zip(&aggregate(&g).values).map(|(p, q)| p.scale(a) + q.scale(b)).collect();
    for (p, q) in combined.values.iter().zip(&separate) {
        assert!((p.0 - q.0).camax() <= 1e-14 * q.0.camax().max(1.0));
    }
}

#[test]
fn misaligned_motions_are_rejected() {
    let base = cube_base(5);
    let field = compact_field(time_grid(3), base, 1.0);
    let eta = DiagonalMetric::minkowski();
    let off_lattice = MotionSpec::uniform(Matrix4R::from_diagonal(&Vector4::new(1.0, 1.01, 1.01, 1.01)), SpacetimeMap::Identity);
    assert!(matches!(transport(&field, &off_lattice, &eta), Err(Error::Alignment { .. })));
    let off_grid_time = MotionSpec::uniform(Matrix4R::identity(), SpacetimeMap::Translate([0.3, 0.0, 0.0, 0.0]));
    assert!(matches!(transport(&field, &off_grid_time, &eta), Err(Error::Alignment { axis: 0, .. })));
    let shift = BaseShift::new([0.0, 0.5, 0.0, 0.0]);
    assert!(matches!(step_translate(&field, &shift, &SpacetimeMap::Identity), Err(Error::Support(_))));
}
