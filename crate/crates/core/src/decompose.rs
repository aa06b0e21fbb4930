//! Factorization of a general linear transformation relative to a base
//! metric: `T = V·Δ·U`.
//!
//! `V` is the orthogonal diagonalizer of `d_g = T·diag(d)·Tᵀ`, `Δ` the
//! positive dilatation taking `d` to the diagonal form `d'` of `d_g`, and
//! `U = Δ⁻¹·V⁻¹·T` the remaining isometry of `d`.

use nalgebra::Vector4;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat4::{self, eig_sym4_with, mat_log_with, Matrix4R};
use crate::metric::{check_invertible, BaseShift, DiagonalMetric};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryFactorization {
    pub v: Matrix4R,
    /// Diagonal, entrywise positive.
    pub delta: Matrix4R,
    pub u: Matrix4R,
    pub source: DiagonalMetric,
    pub target: DiagonalMetric,
    pub base_shift: BaseShift,
}

/// Generators of the three factors: `V = exp(v)`, `Δ = exp(diag(δ))`,
/// `U = exp(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialParts {
    pub v: Matrix4R,
    pub delta: [f64; 4],
    pub u: Matrix4R,
}

/// Residuals of the factorization invariants, all absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationResiduals {
    pub reconstruction: f64,
    pub right_isometry: f64,
    pub orthogonality: f64,
    pub det_v: f64,
    pub dilatation: f64,
}

impl IsometryFactorization {
    pub fn identity(d: &DiagonalMetric) -> Self {
        IsometryFactorization {
            v: Matrix4R::identity(),
            delta: Matrix4R::identity(),
            u: Matrix4R::identity(),
            source: *d,
            target: *d,
            base_shift: BaseShift::ZERO,
        }
    }

    pub fn product(&self) -> Matrix4R {
        self.v * self.delta * self.u
    }

    pub fn residuals(&self, t: &Matrix4R) -> FactorizationResiduals {
        let d = self.source.matrix();
        let dp = self.target.matrix();
        FactorizationResiduals {
            reconstruction: (self.product() - t).norm(),
            right_isometry: (self.u * d * self.u.transpose() - d).norm(),
            orthogonality: (self.v * self.v.transpose() - Matrix4R::identity()).norm(),
            det_v: (self.v.determinant() - 1.0).abs(),
            dilatation: (self.delta * d * self.delta - dp).norm(),
        }
    }
}

pub fn factorize(t: &Matrix4R, d: &DiagonalMetric) -> Result<IsometryFactorization> {
    factorize_with(t, d, &Tolerances::default())
}

pub fn factorize_with(
    t: &Matrix4R,
    d: &DiagonalMetric,
    tol: &Tolerances,
) -> Result<IsometryFactorization> {
    d.require_lorentzian()?;
    check_invertible(t, tol)?;
    mat4::check_branch_cut(t, tol)?;

    let d_g = t * d.matrix() * t.transpose();
    // Exact symmetry; the product above can differ from its transpose by roundoff.
    let d_g = (d_g + d_g.transpose()) * 0.5;
    let eig = eig_sym4_with(&d_g, tol)?;

    let positives = eig.eigenvalues.iter().filter(|v| **v > 0.0).count();
    if positives != 1 || eig.eigenvalues.iter().any(|v| *v == 0.0) {
        let found = eig.eigenvalues.map(|v| if v > 0.0 { 1i8 } else { -1 });
        return Err(Error::Signature {
            found: [found[0], found[1], found[2], found[3]],
        });
    }

    let (eigenvalues, mut v) = assign_slots(&eig.eigenvalues, &eig.eigenvectors);
    mat4::canonicalize_signs(&mut v);

    let entries = d.entries();
    let ratio: [f64; 4] = std::array::from_fn(|k| eigenvalues[k] / entries[k]);
    let delta = Matrix4R::from_diagonal(&Vector4::from(ratio.map(f64::sqrt)));
    let base_shift = BaseShift::new(ratio.map(f64::ln));
    let delta_inv = Matrix4R::from_diagonal(&Vector4::from(ratio.map(|r| 1.0 / r.sqrt())));
    let u = delta_inv * v.transpose() * t;

    Ok(IsometryFactorization {
        v,
        delta,
        u,
        source: *d,
        target: d.shift(&base_shift),
        base_shift,
    })
}

/// Keeps the positive eigenpair in slot 0 and assigns the three negative
/// eigenvectors to slots 1–3 by largest overlap with the coordinate axes.
///
/// Input is in descending eigenvalue order; ties in overlap keep that order.
fn assign_slots(values: &Vector4<f64>, vectors: &Matrix4R) -> (Vector4<f64>, Matrix4R) {
    const PERMUTATIONS: [[usize; 3]; 6] = [
        [1, 2, 3],
        [1, 3, 2],
        [2, 1, 3],
        [2, 3, 1],
        [3, 1, 2],
        [3, 2, 1],
    ];
    let overlap = |perm: &[usize; 3]| -> f64 {
        perm.iter()
            .enumerate()
            .map(|(slot, &col)| vectors[(slot + 1, col)].abs())
            .product()
    };
    let mut best = &PERMUTATIONS[0];
    let mut best_overlap = overlap(best);
    for perm in &PERMUTATIONS[1..] {
        let o = overlap(perm);
        if o > best_overlap {
            best = perm;
            best_overlap = o;
        }
    }
    let order = [0, best[0], best[1], best[2]];
    (
        Vector4::from_fn(|k, _| values[order[k]]),
        Matrix4R::from_fn(|r, c| vectors[(r, order[c])]),
    )
}

pub fn exponential_parts(f: &IsometryFactorization) -> Result<ExponentialParts> {
    exponential_parts_with(f, &Tolerances::default())
}

pub fn exponential_parts_with(
    f: &IsometryFactorization,
    tol: &Tolerances,
) -> Result<ExponentialParts> {
    Ok(ExponentialParts {
        v: mat_log_with(&f.v, tol)?,
        delta: std::array::from_fn(|k| f.delta[(k, k)].ln()),
        u: mat_log_with(&f.u, tol)?,
    })
}
