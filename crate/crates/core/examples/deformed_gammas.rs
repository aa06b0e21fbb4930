use spinfiber::clifford::{deformed_gammas, norm_density, standard_gammas, Spinor};
use spinfiber::metric::DiagonalMetric;

fn main() -> spinfiber::Result<()> {
    let std = standard_gammas();
    println!("γ⁰ (standard) = {:.3}", std.gammas[0]);

    for log_abs in [[0.0; 4], [1.0, 0.0, -0.5, 0.25], [-2.0, 2.0, 0.0, 0.0]] {
        let d = DiagonalMetric::lorentzian(log_abs);
        let rep = deformed_gammas(&d)?;
        let psi = Spinor::from_real([1.0, 0.5, 0.25, 0.0]);
        println!(
            "d = {:?}: anticommutator residual {:.2e}, ψ̄ψ = {:.6}",
            d.entries(),
            rep.anticommutator_residual(),
            norm_density(&rep, &psi),
        );
    }
    Ok(())
}
