//! Dense 4×4 real and complex matrix kernel.
//!
//! Storage and arithmetic come from `nalgebra`; this module adds the pieces
//! the rest of the crate relies on with fixed, deterministic behavior: a
//! cyclic Jacobi eigensolver with canonical ordering and signs, the matrix
//! exponential, and the principal matrix logarithm.

use nalgebra::{ComplexField, Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub use nalgebra::Complex;

pub type Complex64 = Complex<f64>;
pub type Matrix4R = Matrix4<f64>;
pub type Matrix4C = Matrix4<Complex64>;

/// Eigendecomposition of a real symmetric 4×4 matrix, `S = V·diag(λ)·Vᵀ`.
///
/// Eigenvalues are sorted in descending order (stable with respect to the
/// Jacobi output for ties). Each eigenvector column has its largest-magnitude
/// entry positive, and `det V = +1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigSym4 {
    pub eigenvalues: Vector4<f64>,
    pub eigenvectors: Matrix4R,
}

impl EigSym4 {
    pub fn reconstruct(&self) -> Matrix4R {
        self.eigenvectors * Matrix4R::from_diagonal(&self.eigenvalues) * self.eigenvectors.transpose()
    }
}

pub fn eig_sym4(s: &Matrix4R) -> Result<EigSym4> {
    eig_sym4_with(s, &Tolerances::default())
}

pub fn eig_sym4_with(s: &Matrix4R, tol: &Tolerances) -> Result<EigSym4> {
    let scale = s.norm();
    let asymmetry = (s - s.transpose()).norm();
    if asymmetry > tol.symmetry * scale {
        return Err(Error::NotSymmetric {
            asymmetry: if scale > 0.0 { asymmetry / scale } else { asymmetry },
        });
    }
    let (values, vectors) = jacobi(s, tol)?;

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let mut eig = EigSym4 {
        eigenvalues: Vector4::from_fn(|k, _| values[order[k]]),
        eigenvectors: Matrix4R::from_fn(|r, c| vectors[(r, order[c])]),
    };
    canonicalize_signs(&mut eig.eigenvectors);
    Ok(eig)
}

/// Cyclic Jacobi on the symmetrized input. Returns unsorted eigenvalues and
/// the accumulated rotation (columns are eigenvectors).
fn jacobi(s: &Matrix4R, tol: &Tolerances) -> Result<([f64; 4], Matrix4R)> {
    let mut a = (s + s.transpose()) * 0.5;
    let mut v = Matrix4R::identity();
    let threshold = tol.jacobi_off_diagonal * a.norm();

    let off = |a: &Matrix4R| -> f64 {
        let mut sum = 0.0;
        for p in 0..4 {
            for q in 0..4 {
                if p != q {
                    sum += a[(p, q)] * a[(p, q)];
                }
            }
        }
        sum.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > threshold {
        if sweeps == tol.jacobi_max_sweeps {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a[(p, q)];
                // Entries this small cannot keep `off` above the threshold;
                // rotating on roundoff would mix degenerate eigenvectors.
                if apq.abs() * 12f64.sqrt() <= threshold {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let sn = t * c;
                rotate(&mut a, &mut v, p, q, c, sn);
            }
        }
    }
    Ok(([a[(0, 0)], a[(1, 1)], a[(2, 2)], a[(3, 3)]], v))
}

/// Applies the Jacobi rotation `J(p,q,θ)`: `A ← JᵀAJ`, `V ← VJ`.
fn rotate(a: &mut Matrix4R, v: &mut Matrix4R, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..4 {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..4 {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    for k in 0..4 {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Makes each column's largest-magnitude entry positive (lowest row wins
/// ties), then flips column 3 if that left `det V = −1`.
pub(crate) fn canonicalize_signs(v: &mut Matrix4R) {
    for c in 0..4 {
        let mut pivot = 0;
        for r in 1..4 {
            if v[(r, c)].abs() > v[(pivot, c)].abs() {
                pivot = r;
            }
        }
        if v[(pivot, c)] < 0.0 {
            v.column_mut(c).neg_mut();
        }
    }
    if v.determinant() < 0.0 {
        v.column_mut(3).neg_mut();
    }
}

/// Matrix exponential (Padé scaling and squaring, via `nalgebra`).
pub fn mat_exp<T: ComplexField>(a: &Matrix4<T>) -> Matrix4<T> {
    a.exp()
}

pub fn mat_log(t: &Matrix4R) -> Result<Matrix4R> {
    mat_log_with(t, &Tolerances::default())
}

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Rejects matrices with a real eigenvalue on the closed negative axis
/// (including zero) with [`Error::BranchCut`].
pub fn mat_log_with(t: &Matrix4R, tol: &Tolerances) -> Result<Matrix4R> {
    check_branch_cut(t, tol)?;

    let identity = Matrix4R::identity();
    let mut x = *t;
    let mut squarings = 0u32;
    while (x - identity).norm() > 0.25 {
        if squarings == 64 {
            // Unreachable for matrices that passed the eigenvalue gate.
            return Err(Error::NoConvergence { sweeps: 64 });
        }
        x = sqrt_denman_beavers(&x)?;
        squarings += 1;
    }

    // log X = 2·atanh(Z), Z = (X − I)(X + I)⁻¹, ‖Z‖ ≲ 0.15 here.
    let z = (x - identity)
        * (x + identity)
            .try_inverse()
            .ok_or(Error::SingularTransform { det: 0.0 })?;
    let z2 = z * z;
    let mut power = z;
    let mut sum = z;
    for k in 1..60 {
        power *= z2;
        let term = power / (2 * k + 1) as f64;
        sum += term;
        if term.norm() <= 1e-18 * sum.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(sum * (2.0 * 2f64.powi(squarings as i32)))
}

pub(crate) fn check_branch_cut(t: &Matrix4R, tol: &Tolerances) -> Result<()> {
    let det = t.determinant();
    let scale = t.norm().max(f64::MIN_POSITIVE);
    if det.abs() <= tol.singular * scale.powi(4) {
        return Err(Error::BranchCut { re: 0.0, im: 0.0 });
    }
    for ev in t.complex_eigenvalues().iter() {
        if ev.re <= 0.0 && ev.im.abs() <= tol.branch_cut * ev.norm() {
            return Err(Error::BranchCut { re: ev.re, im: ev.im });
        }
    }
    Ok(())
}

/// Principal square root, product form of the Denman–Beavers iteration.
fn sqrt_denman_beavers(x: &Matrix4R) -> Result<Matrix4R> {
    let mut y = *x;
    let mut z = Matrix4R::identity();
    for _ in 0..100 {
        let y_inv = y.try_inverse().ok_or(Error::SingularTransform { det: 0.0 })?;
        let z_inv = z.try_inverse().ok_or(Error::SingularTransform { det: 0.0 })?;
        let y_next = (y + z_inv) * 0.5;
        let z_next = (z + y_inv) * 0.5;
        let step = (y_next - y).norm();
        y = y_next;
        z = z_next;
        if step <= 1e-15 * y.norm() {
            break;
        }
    }
    Ok(y)
}

pub fn complexify(m: &Matrix4R) -> Matrix4C {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Largest absolute entry; the norm used in residual reports.
pub fn max_abs<T: ComplexField>(m: &Matrix4<T>) -> f64
where
    T::RealField: Into<f64>,
{
    m.iter().map(|v| v.clone().abs().into()).fold(0.0, f64::max)
}
