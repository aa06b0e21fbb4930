//! Gamma matrices for a diagonal metric.
//!
//! The Dirac representation is `γ⁰ = diag(1, 1, −1, −1)` and
//! `γⁱ = [[0, σⁱ], [−σⁱ, 0]]`. For a Lorentzian diagonal metric `d` every
//! matrix is scaled by `sqrt|d_k|`, which gives `{γⁿ, γᵐ} = 2·d^{mn}·I`.

use nalgebra::{RowVector4, Vector4};

use crate::error::Result;
use crate::mat4::{Complex64, Matrix4C};
use crate::metric::DiagonalMetric;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A Dirac spinor: `φ` in components 0–1, `χ` in components 2–3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor(pub Vector4<Complex64>);

/// A row spinor, such as the Dirac adjoint `ψ†γ⁰`.
pub type CoSpinor = RowVector4<Complex64>;

impl Spinor {
    pub fn zero() -> Self {
        Spinor(Vector4::zeros())
    }

    pub fn new(c: [Complex64; 4]) -> Self {
        Spinor(Vector4::from(c))
    }

    pub fn from_real(c: [f64; 4]) -> Self {
        Spinor(Vector4::from(c.map(|v| Complex64::new(v, 0.0))))
    }

    pub fn apply(&self, m: &Matrix4C) -> Spinor {
        Spinor(m * self.0)
    }

    pub fn scale(&self, s: Complex64) -> Spinor {
        Spinor(self.0 * s)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl std::ops::Add for Spinor {
    type Output = Spinor;

    fn add(self, rhs: Spinor) -> Spinor {
        Spinor(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Spinor {
    type Output = Spinor;

    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor(self.0 - rhs.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaRep {
    pub metric: DiagonalMetric,
    pub gammas: [Matrix4C; 4],
    /// Conjugation matrix of the Dirac adjoint; equal to `gammas[0]`.
    pub conj: Matrix4C,
}

/// Pauli matrices `σ¹, σ², σ³`.
pub fn pauli() -> [[[Complex64; 2]; 2]; 3] {
    [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -I], [I, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
}

pub fn standard_gammas() -> GammaRep {
    let mut g0 = Matrix4C::zeros();
    g0[(0, 0)] = ONE;
    g0[(1, 1)] = ONE;
    g0[(2, 2)] = -ONE;
    g0[(3, 3)] = -ONE;

    let sigma = pauli();
    let spatial = |s: &[[Complex64; 2]; 2]| {
        let mut g = Matrix4C::zeros();
        for r in 0..2 {
            for c in 0..2 {
                g[(r, c + 2)] = s[r][c];
                g[(r + 2, c)] = -s[r][c];
            }
        }
        g
    };
    let gammas = [g0, spatial(&sigma[0]), spatial(&sigma[1]), spatial(&sigma[2])];
    GammaRep {
        metric: DiagonalMetric::minkowski(),
        conj: gammas[0],
        gammas,
    }
}

/// `γᵏ(d) = sqrt|d_k|·γᵏ`; requires signature (+,−,−,−).
pub fn deformed_gammas(d: &DiagonalMetric) -> Result<GammaRep> {
    d.require_lorentzian()?;
    let scale = d.sqrt_abs();
    let std = standard_gammas();
    let gammas: [Matrix4C; 4] =
        std::array::from_fn(|k| std.gammas[k] * Complex64::new(scale[k], 0.0));
    Ok(GammaRep {
        metric: *d,
        conj: gammas[0],
        gammas,
    })
}

/// `σ^{nm} = (i/2)(γⁿγᵐ − γᵐγⁿ)`.
pub fn sigma(rep: &GammaRep, n: usize, m: usize) -> Matrix4C {
    let gn = &rep.gammas[n];
    let gm = &rep.gammas[m];
    (gn * gm - gm * gn) * Complex64::new(0.0, 0.5)
}

pub fn dirac_adjoint(rep: &GammaRep, psi: &Spinor) -> CoSpinor {
    psi.0.adjoint() * rep.conj
}

/// `ψ̄ψ`. The imaginary part vanishes because `conj` is Hermitian.
pub fn norm_density(rep: &GammaRep, psi: &Spinor) -> f64 {
    (dirac_adjoint(rep, psi) * psi.0)[(0, 0)].re
}

impl GammaRep {
    pub fn sigma(&self, n: usize, m: usize) -> Matrix4C {
        sigma(self, n, m)
    }

    /// Largest entry of `{γⁿ, γᵐ} − 2·d^{mn}·I` over all index pairs.
    pub fn anticommutator_residual(&self) -> f64 {
        let d = self.metric.entries();
        let mut worst: f64 = 0.0;
        for n in 0..4 {
            for m in 0..4 {
                let mut a = self.gammas[n] * self.gammas[m] + self.gammas[m] * self.gammas[n];
                if n == m {
                    for k in 0..4 {
                        a[(k, k)] -= Complex64::new(2.0 * d[n], 0.0);
                    }
                }
                worst = a.iter().map(|c| c.norm()).fold(worst, f64::max);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::mat4::max_abs;
    use crate::metric::metric_from_entries;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scaled_identity(s: f64) -> Matrix4C {
        Matrix4C::identity() * c(s, 0.0)
    }

    #[test]
    fn standard_gamma0_is_block_diagonal() {
        let rep = standard_gammas();
        let expected = Matrix4C::from_diagonal(&Vector4::new(c(1., 0.), c(1., 0.), c(-1., 0.), c(-1., 0.)));
        assert_eq!(rep.gammas[0], expected);
        assert_eq!(rep.conj, rep.gammas[0]);
    }

    #[test]
    fn standard_anticommutators() {
        let rep = standard_gammas();
        let g = &rep.gammas;
        assert_eq!(g[1] * g[2] + g[2] * g[1], Matrix4C::zeros());
        assert_eq!(g[3] * g[3], -Matrix4C::identity());
        assert_eq!(rep.anticommutator_residual(), 0.0);
    }

    #[test]
    fn deformed_at_minkowski_is_standard() {
        assert_eq!(deformed_gammas(&DiagonalMetric::minkowski()).unwrap(), standard_gammas());
    }

    #[test]
    fn deformed_time_entry() {
        let d = metric_from_entries(4.0, -1.0, -1.0, -1.0).unwrap();
        let rep = deformed_gammas(&d).unwrap();
        assert_eq!(rep.gammas[0], standard_gammas().gammas[0] * c(2.0, 0.0));
        assert!(max_abs(&(rep.gammas[0] * rep.gammas[0] - scaled_identity(4.0))) < 1e-14);
    }

    #[test]
    fn deformed_spatial_entry() {
        let d = metric_from_entries(1.0, -9.0, -1.0, -1.0).unwrap();
        let rep = deformed_gammas(&d).unwrap();
        let g1 = rep.gammas[1];
        assert!(max_abs(&(g1 * g1 + g1 * g1 - scaled_identity(-18.0))) < 1e-13);
    }

    #[test]
    fn deformed_rejects_other_signatures() {
        let d = metric_from_entries(-1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(deformed_gammas(&d), Err(Error::Signature { .. })));
    }

    #[test]
    fn sigma_diagonal_vanishes_and_is_antisymmetric() {
        let d = DiagonalMetric::lorentzian([0.3, -0.7, 1.1, 0.2]);
        let rep = deformed_gammas(&d).unwrap();
        for n in 0..4 {
            assert_eq!(sigma(&rep, n, n), Matrix4C::zeros());
            for m in 0..4 {
                assert_eq!(sigma(&rep, n, m), -sigma(&rep, m, n));
            }
        }
    }

    #[test]
    fn sigma12_is_block_pauli3() {
        // γ¹γ² = −iσ³ ⊕ −iσ³, so (i/2)(γ¹γ² − γ²γ¹) = σ³ ⊕ σ³.
        let s = sigma(&standard_gammas(), 1, 2);
        let expected = Matrix4C::from_diagonal(&Vector4::new(c(1., 0.), c(-1., 0.), c(1., 0.), c(-1., 0.)));
        assert_eq!(s, expected);
    }

    #[test]
    fn adjoint_examples() {
        let std = standard_gammas();
        let up = Spinor::from_real([1.0, 0.0, 0.0, 0.0]);
        let down = Spinor::from_real([0.0, 0.0, 1.0, 0.0]);
        assert_eq!(dirac_adjoint(&std, &up), CoSpinor::new(c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)));
        assert_eq!(dirac_adjoint(&std, &down), CoSpinor::new(c(0., 0.), c(0., 0.), c(-1., 0.), c(0., 0.)));

        let d4 = deformed_gammas(&metric_from_entries(4.0, -1.0, -1.0, -1.0).unwrap()).unwrap();
        assert_eq!(dirac_adjoint(&d4, &up), CoSpinor::new(c(2., 0.), c(0., 0.), c(0., 0.), c(0., 0.)));
    }

    #[test]
    fn norm_density_examples() {
        let std = standard_gammas();
        assert_eq!(norm_density(&std, &Spinor::from_real([1.0, 0.0, 0.0, 0.0])), 1.0);
        assert_eq!(norm_density(&std, &Spinor::from_real([0.0, 0.0, 1.0, 0.0])), -1.0);
        assert_eq!(norm_density(&std, &Spinor::from_real([1.0, 0.0, 1.0, 0.0])), 0.0);
    }

    #[test]
    fn norm_density_is_real() {
        let rep = deformed_gammas(&DiagonalMetric::lorentzian([0.5, 0.1, -0.2, 0.3])).unwrap();
        let psi = Spinor::new([c(0.3, -1.2), c(0.7, 0.4), c(-0.5, 0.9), c(1.1, 0.2)]);
        let full = (dirac_adjoint(&rep, &psi) * psi.0)[(0, 0)];
        assert!(full.im.abs() <= 1e-14 * full.norm().max(1.0));
    }
}
