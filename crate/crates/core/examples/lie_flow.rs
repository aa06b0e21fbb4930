//! Flow of a linear vector field and of a Killing rotation, with the
//! accumulated frame map compared to the matrix exponential.

use nalgebra::Vector4;
use spinfiber::geometry::{flow_exponentiate, ChartBounds, LinearField};
use spinfiber::mat4::{mat_exp, Matrix4R};
use spinfiber::metric::DiagonalMetric;
use spinfiber::spinlift::IsometryGenerator;

fn main() -> spinfiber::Result<()> {
    let m = Matrix4R::new(
        0.0, 0.3, 0.0, 0.0,
        0.3, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.1, -0.5,
        0.0, 0.0, 0.5, 0.1,
    );
    let x0 = [0.0, 1.0, 0.5, -0.25];
    let tau = 1.5;
    let flow = flow_exponentiate(&LinearField(m), x0, tau, &ChartBounds::unbounded())?;
    let exact = mat_exp(&(m * tau));
    println!("steps {}, endpoint {:?}", flow.steps, flow.endpoint);
    println!("exact endpoint {:?}", (exact * Vector4::from(x0)).as_slice());
    println!("|A(τ) - exp(τM)| = {:.2e}", (flow.frame_map - exact).amax());

    let rotation = Matrix4R::from_fn(|i, j| match (i, j) {
        (1, 2) => -1.0,
        (2, 1) => 1.0,
        _ => 0.0,
    });
    let generator = IsometryGenerator::new(rotation, DiagonalMetric::minkowski())?;
    let flow = flow_exponentiate(&LinearField(rotation), [0.0, 1.0, 0.0, 0.0], std::f64::consts::FRAC_PI_2, &ChartBounds::unbounded())?;
    println!("quarter turn endpoint {:?}", flow.endpoint);
    println!("|A - exp| = {:.2e}", (flow.frame_map - generator.scaled(std::f64::consts::FRAC_PI_2).exp()).amax());
    Ok(())
}
