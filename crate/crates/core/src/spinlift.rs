//! Spinor lifts of isometries of a diagonal metric.
//!
//! An isometry generator `λ` of `d` (`λ·diag(d) + diag(d)·λᵀ = 0`) lifts to
//!
//! ```text
//! Σ(λ) = (i/4)·λ^k_m·d_{kn}·σ^{mn}(d)
//! ```
//!
//! with the σ-generators of the deformed representation at `d`. The sign is
//! fixed by `[Σ(λ), γᵐ] = −λ^m_n·γⁿ`, so the finite lift `S = exp Σ(λ)`
//! satisfies `S·γᵐ·S⁻¹ = (L⁻¹)^m_n·γⁿ` for `L = exp λ`. This is the
//! convention of `Λ_{1/2}⁻¹·γ^μ·Λ_{1/2} = Λ^μ_ν·γ^ν`.

use crate::clifford::{deformed_gammas, GammaRep};
use crate::error::{Error, Result};
use crate::mat4::{mat_exp, mat_log_with, max_abs, Complex64, Matrix4C, Matrix4R};
use crate::metric::DiagonalMetric;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryGenerator {
    matrix: Matrix4R,
    metric: DiagonalMetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinLift {
    pub matrix: Matrix4C,
    pub metric: DiagonalMetric,
}

impl IsometryGenerator {
    pub fn new(matrix: Matrix4R, metric: DiagonalMetric) -> Result<Self> {
        Self::new_with(matrix, metric, &Tolerances::default())
    }

    pub fn new_with(matrix: Matrix4R, metric: DiagonalMetric, tol: &Tolerances) -> Result<Self> {
        let residual = generator_residual(&matrix, &metric);
        if residual > tol.isometry * metric.max_abs().max(1.0) {
            return Err(Error::NotAnIsometryGenerator { residual });
        }
        Ok(IsometryGenerator { matrix, metric })
    }

    /// Builds `λ^m_k = A^{mn}·d_{nk}` from an antisymmetric `A^{mn}`.
    ///
    /// Only the strictly upper triangle of `raised` is read.
    pub fn from_raised(raised: &Matrix4R, metric: DiagonalMetric) -> Self {
        let a = Matrix4R::from_fn(|r, c| match r.cmp(&c) {
            std::cmp::Ordering::Less => raised[(r, c)],
            std::cmp::Ordering::Greater => -raised[(c, r)],
            std::cmp::Ordering::Equal => 0.0,
        });
        IsometryGenerator {
            matrix: a * metric.inverse_matrix(),
            metric,
        }
    }

    /// Rotation by `angle` in the spatial plane `(i, j)`, `1 ≤ i < j ≤ 3`.
    pub fn rotation(i: usize, j: usize, angle: f64, metric: DiagonalMetric) -> Self {
        let mut raised = Matrix4R::zeros();
        // A^{ij} = θ·sqrt|d_i d_j| gives λ^i_j = −θ·sqrt|d_i/d_j|, the ordinary rotation at η.
        let s = metric.sqrt_abs();
        raised[(i, j)] = angle * s[i] * s[j];
        Self::from_raised(&raised, metric)
    }

    /// Boost of the given rapidity along spatial axis `i`.
    pub fn boost(i: usize, rapidity: f64, metric: DiagonalMetric) -> Self {
        let mut raised = Matrix4R::zeros();
        let s = metric.sqrt_abs();
        raised[(0, i)] = -rapidity * s[0] * s[i];
        Self::from_raised(&raised, metric)
    }

    pub fn matrix(&self) -> &Matrix4R {
        &self.matrix
    }

    pub fn metric(&self) -> &DiagonalMetric {
        &self.metric
    }

    pub fn scaled(&self, s: f64) -> Self {
        IsometryGenerator {
            matrix: self.matrix * s,
            metric: self.metric,
        }
    }

    /// The finite isometry `exp λ`.
    pub fn exp(&self) -> Matrix4R {
        mat_exp(&self.matrix)
    }
}

/// `‖λ·diag(d) + diag(d)·λᵀ‖`.
pub fn generator_residual(lambda: &Matrix4R, d: &DiagonalMetric) -> f64 {
    let dm = d.matrix();
    (lambda * dm + dm * lambda.transpose()).norm()
}

/// `‖L·diag(d)·Lᵀ − diag(d)‖`.
pub fn isometry_residual(l: &Matrix4R, d: &DiagonalMetric) -> f64 {
    let dm = d.matrix();
    (l * dm * l.transpose() - dm).norm()
}

pub fn lift_generator(lambda: &IsometryGenerator) -> Result<Matrix4C> {
    let rep = deformed_gammas(&lambda.metric)?;
    Ok(lift_generator_in(&rep, &lambda.matrix))
}

/// Unchecked lift of `λ` using the σ-generators of `rep`.
pub(crate) fn lift_generator_in(rep: &GammaRep, lambda: &Matrix4R) -> Matrix4C {
    let entries = rep.metric.entries();
    let mut sum = Matrix4C::zeros();
    for k in 0..4 {
        for m in 0..4 {
            if k == m || lambda[(k, m)] == 0.0 {
                continue;
            }
            sum += rep.sigma(m, k) * Complex64::new(lambda[(k, m)] / entries[k], 0.0);
        }
    }
    sum * Complex64::new(0.0, 0.25)
}

/// `exp Σ(λ)`; follows the generator through the double cover, so a `2π`
/// rotation lifts to `−I`.
pub fn lift_exp(lambda: &IsometryGenerator) -> Result<SpinLift> {
    Ok(SpinLift {
        matrix: mat_exp(&lift_generator(lambda)?),
        metric: lambda.metric,
    })
}

pub fn lift_isometry(l: &Matrix4R, d: &DiagonalMetric) -> Result<SpinLift> {
    lift_isometry_with(l, d, &Tolerances::default())
}

/// Lifts an identity-component isometry through its principal logarithm.
pub fn lift_isometry_with(l: &Matrix4R, d: &DiagonalMetric, tol: &Tolerances) -> Result<SpinLift> {
    d.require_lorentzian()?;
    let residual = isometry_residual(l, d);
    if residual > tol.isometry * d.max_abs().max(1.0) {
        return Err(Error::NotAnIsometry { residual });
    }
    let lambda = IsometryGenerator::new_with(mat_log_with(l, tol)?, *d, tol)?;
    lift_exp(&lambda)
}

/// Lifts `mat_log(m)` with the σ-generators of `d` without requiring `m` to
/// be an isometry of `d`.
///
/// Used for the left factor `V` of a factorization, which is orthogonal but
/// in general relates `d'` to a non-diagonal metric. Intertwining holds only
/// when `m` happens to be an isometry of `d`.
pub fn lift_orthogonal(m: &Matrix4R, d: &DiagonalMetric, tol: &Tolerances) -> Result<SpinLift> {
    let rep = deformed_gammas(d)?;
    let generator = mat_log_with(m, tol)?;
    Ok(SpinLift {
        matrix: mat_exp(&lift_generator_in(&rep, &generator)),
        metric: *d,
    })
}

/// `max |S·γᵐ·S⁻¹ − (L⁻¹)^m_n·γⁿ|` over `m` and all entries.
pub fn intertwining_residual(s: &Matrix4C, l: &Matrix4R, rep: &GammaRep) -> Option<f64> {
    let s_inv = s.try_inverse()?;
    let l_inv = l.try_inverse()?;
    let mut worst: f64 = 0.0;
    for m in 0..4 {
        let mut expected = Matrix4C::zeros();
        for n in 0..4 {
            expected += rep.gammas[n] * Complex64::new(l_inv[(m, n)], 0.0);
        }
        worst = worst.max(max_abs(&(s * rep.gammas[m] * s_inv - expected)));
    }
    Some(worst)
}

/// `max |[Σ, γᵐ] + λ^m_n·γⁿ|`: the infinitesimal form of the convention.
pub fn commutator_residual(sigma: &Matrix4C, lambda: &Matrix4R, rep: &GammaRep) -> f64 {
    let mut worst: f64 = 0.0;
    for m in 0..4 {
        let mut expected = Matrix4C::zeros();
        for n in 0..4 {
            expected -= rep.gammas[n] * Complex64::new(lambda[(m, n)], 0.0);
        }
        let commutator = sigma * rep.gammas[m] - rep.gammas[m] * sigma;
        worst = worst.max(max_abs(&(commutator - expected)));
    }
    worst
}

impl SpinLift {
    pub fn identity(metric: DiagonalMetric) -> Self {
        SpinLift {
            matrix: Matrix4C::identity(),
            metric,
        }
    }
}
