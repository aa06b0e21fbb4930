//! Factor a transformation into orthogonal, dilatation and isometry parts
//! relative to a base metric, then print the generators of each factor.

use spinfiber::decompose::{exponential_parts, factorize};
use spinfiber::mat4::Matrix4R;
use spinfiber::metric::DiagonalMetric;

fn main() -> spinfiber::Result<()> {
    let d = DiagonalMetric::lorentzian([0.0, 0.3, -0.2, 0.1]);
    let t = Matrix4R::new(
        1.05, 0.02, -0.03, 0.01,
        0.04, 0.97, 0.08, 0.00,
        -0.02, 0.05, 1.10, -0.06,
        0.03, 0.00, 0.02, 0.92,
    );

    let f = factorize(&t, &d)?;
    println!("source log|d| = {:?}", f.source.log_abs);
    println!("target log|d| = {:?}", f.target.log_abs);
    println!("base shift    = {:?}", f.base_shift.delta);
    println!("V = {:.6}", f.v);
    println!("Δ = {:.6}", f.delta);
    println!("U = {:.6}", f.u);

    let r = f.residuals(&t);
    println!("residuals: {r:?}");

    let parts = exponential_parts(&f)?;
    println!("log V = {:.6}", parts.v);
    println!("log Δ = {:?}", parts.delta);
    println!("log U = {:.6}", parts.u);
    Ok(())
}
