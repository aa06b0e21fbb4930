//! Time evolution in an expanding background as motion along the base:
//! the scale factor ratio becomes a shift of the spatial log-metric.

use spinfiber::clifford::Spinor;
use spinfiber::fiber::{total_norm, transport, BaseGrid, FiberSpinorField};
use spinfiber::frw::{frw_lie_operator, frw_motion, snap_t2, ScaleFactor};
use spinfiber::geometry::{Axis, ChartGrid};
use spinfiber::mat4::Complex64;
use spinfiber::metric::DiagonalMetric;

fn bump(t: f64, l: [f64; 4]) -> Spinor {
    let a = (-(l[1] * l[1] + l[2] * l[2] + l[3] * l[3]) / 0.01).exp() * (-t * t / 0.05).exp();
    Spinor::new([Complex64::new(a, 0.0), Complex64::new(0.0, 0.3 * a), Complex64::new(0.0, 0.0), Complex64::new(0.1 * a, 0.0)])
}

fn main() -> spinfiber::Result<()> {
    let scale = ScaleFactor::Exp { h: 0.2 };
    let s = 0.05;
    let ell = Axis::new(-0.3, s, 13)?;
    let base = BaseGrid::new([Axis::single(0.0), ell, ell, ell]);
    let spacetime = ChartGrid::new([Axis::new(0.0, 0.125, 17)?, Axis::single(0.0), Axis::single(0.0), Axis::single(0.0)]);
    let eta = DiagonalMetric::minkowski();

    let snap = snap_t2(&scale, 0.0, 0.4, s)?;
    println!("t₂ requested {:.3}, snapped to {:.3} ({} base cells)", snap.requested, snap.t2, snap.cells);

    // Zero the samples that the motion would carry off either grid.
    let reach = snap.cells as f64 * s;
    let t_end = spacetime.axes[0].last();
    let field = FiberSpinorField::from_fn(spacetime, base, |x, d| {
        let fits = x[0] + snap.t2 <= t_end + 1e-9 && d.log_abs[1..].iter().all(|l| l + reach <= ell.last() + 1e-9);
        if fits { bump(x[0], d.log_abs) } else { Spinor::zero() }
    });
    let moved = transport(&field, &frw_motion(&scale, 0.0, snap.t2)?, &eta)?;
    println!("norm {:.12} -> {:.12}", total_norm(&field), total_norm(&moved));

    let full = FiberSpinorField::from_fn(spacetime, base, |x, d| bump(x[0], d.log_abs));
    let lie = frw_lie_operator(&full)?;
    let center = base.index([0, 6, 6, 6]);
    println!("(∂t + Σ∂ℓ)ψ at t=0.5, ℓ=0: {:?}", lie.get(spacetime.index([4, 0, 0, 0]), center));
    Ok(())
}
