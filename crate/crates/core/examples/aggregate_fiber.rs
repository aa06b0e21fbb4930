use spinfiber::clifford::Spinor;
use spinfiber::fiber::{aggregate, BaseGrid, FiberSpinorField};
use spinfiber::geometry::{Axis, ChartGrid};
use spinfiber::mat4::Complex64;

fn main() -> spinfiber::Result<()> {
    let ell = Axis::new(-1.0, 0.25, 9)?;
    let base = BaseGrid::new([Axis::single(0.0), ell, ell, ell]);
    let spacetime = ChartGrid::new([Axis::new(0.0, 1.0, 3)?, Axis::single(0.0), Axis::single(0.0), Axis::single(0.0)]);

    // A Gaussian in ℓ: the quadrature approaches (π·0.2)^{3/2}.
    let field = FiberSpinorField::from_fn(spacetime, base, |x, d| {
        let r2: f64 = d.log_abs[1..].iter().map(|l| l * l).sum();
        Spinor::new([Complex64::new((1.0 + x[0]) * (-r2 / 0.2).exp(), 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)])
    });
    let psi = aggregate(&field);
    let exact = (std::f64::consts::PI * 0.2).powf(1.5);
    for (i, v) in psi.values.iter().enumerate() {
        println!("t = {}: ψ₀ = {:.8}, expected {:.8}", spacetime.coordinates(i)[0], v.0[0].re, (1.0 + i as f64) * exact);
    }
    Ok(())
}
