//! The base space of nondegenerate diagonal metrics.
//!
//! A point is stored as four signs plus the natural logs of the entry
//! magnitudes. In that chart a positive diagonal dilatation acts by adding a
//! constant vector, so base translations are exact and the uniform measure is
//! translation invariant.

use std::ops::Add;

use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat4::Matrix4R;
use crate::tolerance::Tolerances;

pub const LORENTZ_SIGNS: [i8; 4] = [1, -1, -1, -1];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalMetric {
    pub signs: [i8; 4],
    pub log_abs: [f64; 4],
}

/// A translation of the base in the log chart.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BaseShift {
    pub delta: [f64; 4],
}

impl BaseShift {
    pub const ZERO: BaseShift = BaseShift { delta: [0.0; 4] };

    pub fn new(delta: [f64; 4]) -> Self {
        BaseShift { delta }
    }
}

impl Add for BaseShift {
    type Output = BaseShift;

    fn add(self, rhs: BaseShift) -> BaseShift {
        BaseShift {
            delta: std::array::from_fn(|k| self.delta[k] + rhs.delta[k]),
        }
    }
}

impl DiagonalMetric {
    /// The Minkowski metric `diag(1, −1, −1, −1)`.
    pub fn minkowski() -> Self {
        DiagonalMetric {
            signs: LORENTZ_SIGNS,
            log_abs: [0.0; 4],
        }
    }

    /// Builds a metric from signs and log-magnitudes, rejecting signs outside
    /// `{+1, −1}` and non-finite logs.
    pub fn new(signs: [i8; 4], log_abs: [f64; 4]) -> Result<Self> {
        if let Some(k) = signs.iter().position(|s| *s != 1 && *s != -1) {
            return Err(Error::Input(format!("sign {} at slot {k} is not ±1", signs[k])));
        }
        if log_abs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("log_abs entries must be finite".into()));
        }
        Ok(DiagonalMetric { signs, log_abs })
    }

    /// Lorentzian metric `diag(e^{ℓ0}, −e^{ℓ1}, −e^{ℓ2}, −e^{ℓ3})`.
    pub fn lorentzian(log_abs: [f64; 4]) -> Self {
        DiagonalMetric {
            signs: LORENTZ_SIGNS,
            log_abs,
        }
    }

    pub fn from_entries(d: [f64; 4]) -> Result<Self> {
        metric_from_entries(d[0], d[1], d[2], d[3])
    }

    pub fn entry(&self, k: usize) -> f64 {
        f64::from(self.signs[k]) * self.log_abs[k].exp()
    }

    pub fn entries(&self) -> [f64; 4] {
        std::array::from_fn(|k| self.entry(k))
    }

    /// `sqrt|d_k|`, the per-axis scale of the deformed gamma matrices.
    pub fn sqrt_abs(&self) -> [f64; 4] {
        std::array::from_fn(|k| (0.5 * self.log_abs[k]).exp())
    }

    /// `diag(d)` as a matrix (the upper-index metric `d^{mn}`).
    pub fn matrix(&self) -> Matrix4R {
        Matrix4R::from_diagonal(&Vector4::from(self.entries()))
    }

    /// `diag(1/d)`: the lower-index metric `d_{mn}`.
    pub fn inverse_matrix(&self) -> Matrix4R {
        Matrix4R::from_diagonal(&Vector4::from(self.entries().map(|v| 1.0 / v)))
    }

    pub fn is_lorentzian(&self) -> bool {
        self.signs == LORENTZ_SIGNS
    }

    pub fn require_lorentzian(&self) -> Result<()> {
        if self.is_lorentzian() {
            Ok(())
        } else {
            Err(Error::Signature { found: self.signs })
        }
    }

    /// Largest `|d_k|`.
    pub fn max_abs(&self) -> f64 {
        self.log_abs.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp()
    }

    pub fn shift(&self, by: &BaseShift) -> DiagonalMetric {
        shift(self, by)
    }
}

pub fn metric_from_entries(d0: f64, d1: f64, d2: f64, d3: f64) -> Result<DiagonalMetric> {
    let d = [d0, d1, d2, d3];
    if let Some(index) = d.iter().position(|v| *v == 0.0) {
        return Err(Error::DegenerateMetric { index });
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("metric entries must be finite".into()));
    }
    Ok(DiagonalMetric {
        signs: d.map(|v| if v > 0.0 { 1 } else { -1 }),
        log_abs: d.map(|v| v.abs().ln()),
    })
}

/// Translates `d` in the log chart; signs never change.
pub fn shift(d: &DiagonalMetric, by: &BaseShift) -> DiagonalMetric {
    DiagonalMetric {
        signs: d.signs,
        log_abs: std::array::from_fn(|k| d.log_abs[k] + by.delta[k]),
    }
}

pub fn congruence(d: &DiagonalMetric, t: &Matrix4R) -> Result<Matrix4R> {
    congruence_with(d, t, &Tolerances::default())
}

/// `d_g = T·diag(d)·Tᵀ`.
pub fn congruence_with(d: &DiagonalMetric, t: &Matrix4R, tol: &Tolerances) -> Result<Matrix4R> {
    check_invertible(t, tol)?;
    Ok(t * d.matrix() * t.transpose())
}

pub(crate) fn check_invertible(t: &Matrix4R, tol: &Tolerances) -> Result<()> {
    let det = t.determinant();
    let scale = t.norm();
    if !det.is_finite() || det.abs() <= tol.singular * scale.powi(4) || scale == 0.0 {
        return Err(Error::SingularTransform { det });
    }
    Ok(())
}
