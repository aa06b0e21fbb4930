//! Transport of a fiber spinor field under a rotation composed with a
//! lattice-aligned spatial dilatation, shown step by step.

use nalgebra::Vector4;
use spinfiber::clifford::Spinor;
use spinfiber::fiber::{total_norm, BaseGrid, FiberSpinorField, MotionSpec, SpacetimeMap, TransportPlan};
use spinfiber::geometry::{Axis, ChartGrid};
use spinfiber::mat4::{Complex64, Matrix4R};
use spinfiber::metric::DiagonalMetric;
use spinfiber::tolerance::Tolerances;

fn main() -> spinfiber::Result<()> {
    let s = 0.1;
    let ell = Axis::new(-0.2, s, 5)?;
    let base = BaseGrid::new([Axis::single(0.0), ell, ell, ell]);
    let spacetime = ChartGrid::new([Axis::new(0.0, 0.5, 4)?, Axis::single(0.0), Axis::single(0.0), Axis::single(0.0)]);

    // Supported where ℓ₁ = ℓ₂, so the rotation in (1,2) is an isometry of
    // every target metric and the norm is conserved.
    let field = FiberSpinorField::from_fn(spacetime, base, |x, d| {
        let [_, l1, l2, l3] = d.log_abs;
        if x[0] < 1.0 && (l1 - l2).abs() < 1e-12 && l1 <= 0.0 && l3 <= 0.1 {
            Spinor::new([Complex64::new(1.0, l3), Complex64::new(0.2, 0.0), Complex64::new(0.0, x[0]), Complex64::new(0.1, 0.0)])
        } else {
            Spinor::zero()
        }
    });

    let theta: f64 = 0.6;
    let mut rotation = Matrix4R::identity();
    rotation[(1, 1)] = theta.cos();
    rotation[(1, 2)] = -theta.sin();
    rotation[(2, 1)] = theta.sin();
    rotation[(2, 2)] = theta.cos();
    let r = (s / 2.0).exp();
    let t = rotation * Matrix4R::from_diagonal(&Vector4::new(1.0, r, r, r));
    let motion = MotionSpec::uniform(t, SpacetimeMap::Translate([0.5, 0.0, 0.0, 0.0]));

    let plan = TransportPlan::new(&field, &motion, &DiagonalMetric::minkowski(), &Tolerances::default())?;
    println!("base cells moved {:?}, spacetime cells moved {:?}", plan.cells, plan.offset);

    let right = plan.right_step(&field)?;
    let moved = plan.translate_step(&right)?;
    let out = plan.left_step(&moved)?;
    println!("support before {:?}", field.base_support());
    println!("support after  {:?}", out.base_support());
    for (name, f) in [("input", &field), ("right", &right), ("moved", &moved), ("output", &out)] {
        println!("{name:>6}: total norm {:.15}", total_norm(f));
    }
    assert_eq!(out, plan.apply(&field)?);
    Ok(())
}
