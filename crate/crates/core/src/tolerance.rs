//! Default numerical tolerances.
//!
//! Every check in the crate reads its threshold from a [`Tolerances`] value.
//! The free functions use [`Tolerances::default`]; the `*_with` variants take
//! an explicit set, which is how the command-line front end applies `--tol`.

/// Relative asymmetry accepted by the symmetric eigensolver.
pub const SYMMETRY: f64 = 1e-12;
/// Jacobi stops when the off-diagonal Frobenius norm drops below this times `‖S‖`.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 50;
/// Isometry and isometry-generator residuals.
pub const ISOMETRY: f64 = 1e-10;
/// An eigenvalue with `|im| <= BRANCH_CUT * |λ|` and `re <= 0` is on the cut.
pub const BRANCH_CUT: f64 = 1e-12;
/// Relative slack when deciding that a base shift is a whole number of cells.
pub const LATTICE: f64 = 1e-9;
/// Relative `|det|` below which a transformation counts as singular.
pub const SINGULAR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub symmetry: f64,
    pub jacobi_off_diagonal: f64,
    pub jacobi_max_sweeps: usize,
    pub isometry: f64,
    pub branch_cut: f64,
    pub lattice: f64,
    pub singular: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            symmetry: SYMMETRY,
            jacobi_off_diagonal: JACOBI_OFF_DIAGONAL,
            jacobi_max_sweeps: JACOBI_MAX_SWEEPS,
            isometry: ISOMETRY,
            branch_cut: BRANCH_CUT,
            lattice: LATTICE,
            singular: SINGULAR,
        }
    }
}
