//! Lifts of a rotation family at a deformed base point. The lift at angle
//! 2π is −I and only returns to I at 4π.

use std::f64::consts::PI;

use spinfiber::clifford::deformed_gammas;
use spinfiber::mat4::Matrix4C;
use spinfiber::metric::DiagonalMetric;
use spinfiber::spinlift::{intertwining_residual, lift_exp, IsometryGenerator};

fn main() -> spinfiber::Result<()> {
    let d = DiagonalMetric::lorentzian([0.4, 0.7, 0.7, -0.3]);
    let rep = deformed_gammas(&d)?;
    for k in 0..=8 {
        let angle = k as f64 * PI / 2.0;
        let lambda = IsometryGenerator::rotation(1, 2, angle, d);
        let s = lift_exp(&lambda)?.matrix;
        let to_identity = (s - Matrix4C::identity()).camax();
        let to_minus = (s + Matrix4C::identity()).camax();
        let res = intertwining_residual(&s, &lambda.exp(), &rep).unwrap_or(f64::NAN);
        println!("θ = {:4.2}π  |S-I| = {to_identity:.2e}  |S+I| = {to_minus:.2e}  intertwining {res:.1e}", angle / PI);
    }

    let boost = IsometryGenerator::boost(1, 0.8, d);
    let s = lift_exp(&boost)?.matrix;
    println!("boost lift: {:.4}", s);
    Ok(())
}
