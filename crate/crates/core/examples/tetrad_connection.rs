//! Spin connection of a sampled FRW tetrad and the covariant derivative of
//! a spinor field on the same grid.

use spinfiber::clifford::{standard_gammas, Spinor};
use spinfiber::frw::{frw_generator, frw_tetrad, ScaleFactor};
use spinfiber::geometry::{check_orthonormality, covariant_derivative, spin_connection, Axis, ChartGrid, GridField};
use spinfiber::mat4::Complex64;

fn main() -> spinfiber::Result<()> {
    let scale = ScaleFactor::Power { p: 2.0 / 3.0 };
    let grid = ChartGrid::new([
        Axis::new(1.0, 0.02, 11)?,
        Axis::new(0.0, 0.1, 3)?,
        Axis::single(0.0),
        Axis::single(0.0),
    ]);
    let (e, g) = frw_tetrad(&scale, &grid)?;
    let report = check_orthonormality(&e, &g, 1e-12)?;
    println!("orthonormality residual {:.2e}, flagged {}", report.max, report.flagged.len());

    let omega = spin_connection(&e)?;
    for it in [0, 5, 10] {
        let w = omega.at([it, 1, 0, 0]);
        let t = grid.axes[0].coordinate(it);
        let exact = frw_generator(&scale, t);
        println!("t = {t:.2}: ω_t[1][1] = {:.6}, Ṙ/R = {:.6}", w[0][(1, 1)], exact[(1, 1)]);
    }

    let psi = GridField::from_fn(grid, |x| {
        let phase = Complex64::new(0.0, 2.0 * x[1]).exp();
        Spinor::new([phase, Complex64::new(0.0, 0.0), Complex64::new(x[0], 0.0), Complex64::new(0.0, 0.0)])
    });
    let nabla = covariant_derivative(&psi, &omega, &standard_gammas())?;
    println!("∇_x ψ at the center: {:?}", nabla.field.at([5, 1, 0, 0])[1]);
    Ok(())
}
