use crate::clifford::{GammaRep, Spinor};
use crate::error::{Error, Result};
use crate::geometry::grid::{gradient, is_interior, CoordinateMetricField, GridField, SpinorField, TetradField};
use crate::mat4::{Complex64, Matrix4C, Matrix4R};
use crate::metric::DiagonalMetric;

/// Per-point residual of `e^k_μ e^m_ν g^{μν} − η^{km}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalityReport {
    /// Largest absolute entry at each grid point.
    pub residuals: Vec<f64>,
    pub max: f64,
    /// Grid points whose residual exceeds the tolerance.
    pub flagged: Vec<usize>,
}

pub fn check_orthonormality(
    e: &TetradField,
    g: &CoordinateMetricField,
    tol: f64,
) -> Result<OrthonormalityReport> {
    e.grid.require_match(&g.grid, "tetrad and metric grids differ")?;
    let eta = DiagonalMetric::minkowski().matrix();
    let residuals: Vec<f64> = e
        .values
        .iter()
        .zip(&g.values)
        .map(|(e, g)| (e * g * e.transpose() - eta).amax())
        .collect();
    let flagged = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > tol)
        .map(|(i, _)| i)
        .collect();
    Ok(OrthonormalityReport {
        max: residuals.iter().copied().fold(0.0, f64::max),
        residuals,
        flagged,
    })
}

/// `ω^k_{mν}` at every grid point, stored as four `(k, m)` matrices indexed by `ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinConnectionField {
    pub field: GridField<[Matrix4R; 4]>,
    /// Grid points where a one-sided stencil was used.
    pub boundary: Vec<usize>,
}

impl SpinConnectionField {
    pub fn at(&self, multi: [usize; 4]) -> &[Matrix4R; 4] {
        self.field.at(multi)
    }
}

/// `ω^k_{mν} = (∂_ν e^k_μ)·E^μ_m` with `E = e⁻¹`.
///
/// This is the frame connection defined by
/// `e^k_μ(x + dx) = e^k_μ(x) + dx^ν ω^k_{mν} e^m_μ(x)`, with partial
/// derivatives only (no transport of the coordinate index).
pub fn spin_connection(e: &TetradField) -> Result<SpinConnectionField> {
    let grid = e.grid;
    let mut values = Vec::with_capacity(grid.len());
    let mut boundary = Vec::new();
    for i in 0..grid.len() {
        let multi = grid.multi_index(i);
        let inverse = e.values[i]
            .try_inverse()
            .ok_or(Error::SingularFrame { point: i })?;
        let (d, one_sided) = gradient(e, multi)?;
        if one_sided {
            boundary.push(i);
        }
        values.push(d.map(|de| de * inverse));
    }
    Ok(SpinConnectionField {
        field: GridField { grid, values },
        boundary,
    })
}

/// `(i/4)·ω^k_{mμ}·η_{kn}·σ^{nm}` for one coordinate direction.
pub fn connection_term(omega: &Matrix4R, rep: &GammaRep) -> Matrix4C {
    let lower = rep.metric.inverse_matrix();
    let mut sum = Matrix4C::zeros();
    for k in 0..4 {
        for m in 0..4 {
            let w = omega[(k, m)] * lower[(k, k)];
            if k == m || w == 0.0 {
                continue;
            }
            sum += rep.sigma(k, m) * Complex64::new(w, 0.0);
        }
    }
    sum * Complex64::new(0.0, 0.25)
}

/// Spinor covariant derivative `∇_μψ` at every grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantDerivative {
    /// `values[i][μ]` is `∇_μψ` at grid point `i`.
    pub field: GridField<[Spinor; 4]>,
    pub boundary: Vec<usize>,
}

/// `∇_μψ = ∂_μψ + (i/4)·ω^k_{mμ}·η_{kn}·σ^{nm}·ψ`.
pub fn covariant_derivative(
    psi: &SpinorField,
    omega: &SpinConnectionField,
    rep: &GammaRep,
) -> Result<CovariantDerivative> {
    if !rep.metric.is_lorentzian() || rep.metric.log_abs != [0.0; 4] {
        return Err(Error::Input(
            "covariant derivative needs the Minkowski representation".into(),
        ));
    }
    psi.grid
        .require_match(&omega.field.grid, "spinor field and connection grids differ")?;
    let grid = psi.grid;
    let mut values = Vec::with_capacity(grid.len());
    let mut boundary = Vec::new();
    for i in 0..grid.len() {
        let multi = grid.multi_index(i);
        let (d, one_sided) = gradient(psi, multi)?;
        if one_sided || !is_interior(&grid, multi) {
            boundary.push(i);
        }
        let w = &omega.field.values[i];
        let here = psi.values[i];
        values.push(std::array::from_fn(|mu| {
            d[mu] + here.apply(&connection_term(&w[mu], rep))
        }));
    }
    Ok(CovariantDerivative {
        field: GridField { grid, values },
        boundary,
    })
}

/// Frame index lowered with η: `ω_{kmν} = η_{kk'}·ω^{k'}_{mν}`.
pub fn lower_frame_index(omega: &Matrix4R) -> Matrix4R {
    DiagonalMetric::minkowski().inverse_matrix() * omega
}
