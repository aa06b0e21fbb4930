use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinfiber::clifford::{deformed_gammas, norm_density, Spinor};
use spinfiber::mat4::{Complex64, Matrix4C, Matrix4R};
use spinfiber::metric::DiagonalMetric;
use spinfiber::spinlift::{intertwining_residual, lift_exp, lift_isometry, IsometryGenerator};

fn random_metric(rng: &mut ChaCha8Rng) -> DiagonalMetric {
    DiagonalMetric::lorentzian(std::array::from_fn(|_| rng.gen_range(-3.0..3.0)))
}

/// A random generator at `d` with Frobenius norm at most `bound`.
fn random_generator(rng: &mut ChaCha8Rng, d: DiagonalMetric, bound: f64) -> IsometryGenerator {
    let a = Matrix4R::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let lambda = IsometryGenerator::from_raised(&(a - a.transpose()), d);
    let norm = lambda.matrix().norm();
    lambda.scaled(bound * rng.gen_range(0.0..1.0) / norm.max(1e-300))
}

fn random_spinor(rng: &mut ChaCha8Rng) -> Spinor {
    Spinor::new(std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
}

#[test]
fn intertwining_over_random_generators() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let d = random_metric(&mut rng);
        let lambda = random_generator(&mut rng, d, 1.0);
        let s = lift_exp(&lambda).unwrap();
        let rep = deformed_gammas(&d).unwrap();
        worst = worst.max(intertwining_residual(&s.matrix, &lambda.exp(), &rep).unwrap());
    }
    assert!(worst <= 1e-9, "worst intertwining residual {worst}");
}

#[test]
fn lift_of_exponential_matches_lift_isometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let d = random_metric(&mut rng);
        let lambda = random_generator(&mut rng, d, 1.0);
        let a = lift_exp(&lambda).unwrap().matrix;
        let b = lift_isometry(&lambda.exp(), &d).unwrap().matrix;
        assert!((a - b).camax() <= 1e-9);
    }
}

#[test]
fn norm_density_is_preserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..500 {
        let d = random_metric(&mut rng);
        let lambda = random_generator(&mut rng, d, 1.0);
        let s = lift_exp(&lambda).unwrap().matrix;
        let rep = deformed_gammas(&d).unwrap();
        let psi = random_spinor(&mut rng);
        let before = norm_density(&rep, &psi);
        let after = norm_density(&rep, &psi.apply(&s));
        // ψ̄ψ may cancel to near zero; measure against the definite form ψ†|γ⁰|ψ.
        let scale = d.sqrt_abs()[0] * psi.0.norm_squared();
        assert!((after - before).abs() <= 1e-10 * scale, "{before} vs {after}");
    }
}

#[test]
fn projective_homomorphism_near_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let d = random_metric(&mut rng);
        let l1 = random_generator(&mut rng, d, 0.5).exp();
        let l2 = random_generator(&mut rng, d, 0.5).exp();
        let s1 = lift_isometry(&l1, &d).unwrap().matrix;
        let s2 = lift_isometry(&l2, &d).unwrap().matrix;
        let s12 = lift_isometry(&(l1 * l2), &d).unwrap().matrix;
        let plus = (s12 - s1 * s2).camax();
        let minus = (s12 + s1 * s2).camax();
        assert!(plus <= 1e-8, "sign flipped near identity: {plus} vs {minus}");
    }
}

#[test]
fn full_rotation_is_minus_identity() {
    let turn = IsometryGenerator::rotation(1, 2, 2.0 * std::f64::consts::PI, DiagonalMetric::minkowski());
    let s = lift_exp(&turn).unwrap().matrix;
    assert!((s + Matrix4C::identity()).camax() <= 1e-10);
    let double = turn.scaled(2.0);
    assert!((lift_exp(&double).unwrap().matrix - Matrix4C::identity()).camax() <= 1e-10);
}
