//! Spatially flat FRW spacetime `ds² = dt² − R²(t)·dl²`.
//!
//! The time flow dilates the spatial frame by `r = R(t₂)/R(t₁)`, which moves
//! the base point by `2·ln r` along each spatial log axis.

use nalgebra::Vector4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::Spinor;
use crate::error::{Error, Result};
use crate::fiber::{FiberSpinorField, MotionSpec, SpacetimeMap};
use crate::geometry::grid::stencil;
use crate::geometry::{ChartGrid, CoordinateMetricField, FrameField, GridField, TetradField};
use crate::mat4::Matrix4R;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScaleFactor {
    /// `R = e^{Ht}`.
    Exp { h: f64 },
    /// `R = t^p`, for `t > 0`.
    Power { p: f64 },
    /// `R ≡ c`.
    Constant { c: f64 },
}

impl ScaleFactor {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ScaleFactor::Exp { h } => (h * t).exp(),
            ScaleFactor::Power { p } => t.powf(p),
            ScaleFactor::Constant { c } => c,
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            ScaleFactor::Exp { h } => h * (h * t).exp(),
            ScaleFactor::Power { p } => p * t.powf(p - 1.0),
            ScaleFactor::Constant { .. } => 0.0,
        }
    }

    /// `Ṙ/R`.
    pub fn hubble(&self, t: f64) -> f64 {
        match *self {
            ScaleFactor::Exp { h } => h,
            ScaleFactor::Power { p } => p / t,
            ScaleFactor::Constant { .. } => 0.0,
        }
    }

    /// `R(t)`, rejecting points where it is not finite and positive.
    pub fn checked(&self, t: f64) -> Result<f64> {
        let r = self.value(t);
        if r.is_finite() && r > 0.0 && !(matches!(self, ScaleFactor::Power { .. }) && t <= 0.0) {
            Ok(r)
        } else {
            Err(Error::ScaleFactor { t })
        }
    }

    /// `ln(R(t₂)/R(t₁))`.
    pub fn log_ratio(&self, t1: f64, t2: f64) -> f64 {
        match *self {
            ScaleFactor::Exp { h } => h * (t2 - t1),
            ScaleFactor::Power { p } => p * (t2 / t1).ln(),
            ScaleFactor::Constant { .. } => 0.0,
        }
    }

    /// The time `t₂` with `ln(R(t₂)/R(t₁)) = target`, if the scale factor reaches it.
    pub fn time_for_log_ratio(&self, t1: f64, target: f64) -> Option<f64> {
        match *self {
            ScaleFactor::Exp { h } if h != 0.0 => Some(t1 + target / h),
            ScaleFactor::Power { p } if p != 0.0 => Some(t1 * (target / p).exp()),
            _ => (target == 0.0).then_some(t1),
        }
    }
}

/// The FRW frame field `e = diag(1, R, R, R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrwFrame(pub ScaleFactor);

impl FrameField for FrwFrame {
    fn frame(&self, x: &[f64; 4]) -> Matrix4R {
        let r = self.0.value(x[0]);
        Matrix4R::from_diagonal(&Vector4::new(1.0, r, r, r))
    }

    fn partial(&self, x: &[f64; 4], nu: usize) -> Matrix4R {
        if nu != 0 {
            return Matrix4R::zeros();
        }
        let dr = self.0.derivative(x[0]);
        Matrix4R::from_diagonal(&Vector4::new(0.0, dr, dr, dr))
    }
}

/// Samples the FRW tetrad and inverse coordinate metric on `grid`.
pub fn frw_tetrad(scale: &ScaleFactor, grid: &ChartGrid) -> Result<(TetradField, CoordinateMetricField)> {
    for t in grid.axes[0].coordinates() {
        scale.checked(t)?;
    }
    let frame = FrwFrame(*scale);
    let e = GridField::from_fn(*grid, |x| frame.frame(&x));
    let g = GridField::from_fn(*grid, |x| {
        let r = scale.value(x[0]);
        let inv = -1.0 / (r * r);
        Matrix4R::from_diagonal(&Vector4::new(1.0, inv, inv, inv))
    });
    Ok((e, g))
}

/// `Ṙ/R·diag(0,1,1,1)`: the generator direction of the time-flow dilatation,
/// and the (frame, frame) block of the FRW connection along `t`.
pub fn frw_generator(scale: &ScaleFactor, t: f64) -> Matrix4R {
    let h = scale.hubble(t);
    Matrix4R::from_diagonal(&Vector4::new(0.0, h, h, h))
}

/// The motion carrying `t₁` to `t₂`: `t ↦ t + (t₂ − t₁)` with frame
/// dilatation `diag(1, r, r, r)`, `r = R(t₂)/R(t₁)`.
pub fn frw_motion(scale: &ScaleFactor, t1: f64, t2: f64) -> Result<MotionSpec> {
    scale.checked(t1)?;
    scale.checked(t2)?;
    let r = scale.log_ratio(t1, t2).exp();
    let map = if t2 == t1 {
        SpacetimeMap::Identity
    } else {
        SpacetimeMap::Translate([t2 - t1, 0.0, 0.0, 0.0])
    };
    Ok(MotionSpec::uniform(
        Matrix4R::from_diagonal(&Vector4::new(1.0, r, r, r)),
        map,
    ))
}

/// Result of moving `t₂` onto the base lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snap {
    pub requested: f64,
    pub t2: f64,
    pub distance: f64,
    /// Base cells moved along each spatial axis.
    pub cells: i64,
}

/// Nearest `t₂` for which `2·ln r` is a whole multiple of `base_spacing`.
pub fn snap_t2(scale: &ScaleFactor, t1: f64, t2: f64, base_spacing: f64) -> Result<Snap> {
    let cells = (2.0 * scale.log_ratio(t1, t2) / base_spacing).round();
    let snapped = scale
        .time_for_log_ratio(t1, cells * base_spacing / 2.0)
        .unwrap_or(t2);
    scale.checked(snapped)?;
    Ok(Snap {
        requested: t2,
        t2: snapped,
        distance: (snapped - t2).abs(),
        cells: cells as i64,
    })
}

/// `∂ψ/∂t + Σᵢ ∂ψ/∂ℓᵢ` over spacetime × base, with `ℓᵢ = ln|dᵢ|`.
///
/// Second-order stencils, centered where possible and one-sided at edges.
/// The time axis and spatial base axes need at least three samples; the
/// error reports spacetime axes as 0–3 and base axes as 4–7.
pub fn frw_lie_operator(field: &FiberSpinorField) -> Result<FiberSpinorField> {
    if field.spacetime.axes[0].len < 3 {
        return Err(Error::Stencil { axis: 0 });
    }
    for k in 1..4 {
        if field.base.axes[k].len < 3 {
            return Err(Error::Stencil { axis: 4 + k });
        }
    }
    let st = field.spacetime;
    let base = field.base;
    let nb = base.len();
    let t_axis = st.axes[0];
    let values = (0..field.values.len())
        .into_par_iter()
        .map(|slot| {
            let (x, d) = (slot / nb, slot % nb);
            let xm = st.multi_index(x);
            let dm = base.multi_index(d);
            let (mut sum, _) = stencil(
                |i| {
                    let mut m = xm;
                    m[0] = i;
                    *field.get(st.index(m), d)
                },
                xm[0],
                t_axis.len,
                t_axis.spacing,
            )
            .expect("checked length");
            for k in 1..4 {
                let ax = base.axes[k];
                let (dk, _) = stencil(
                    |i| {
                        let mut m = dm;
                        m[k] = i;
                        *field.get(x, base.index(m))
                    },
                    dm[k],
                    ax.len,
                    ax.spacing,
                )
                .expect("checked length");
                sum = sum + dk;
            }
            sum
        })
        .collect::<Vec<Spinor>>();
    Ok(FiberSpinorField {
        spacetime: st,
        base,
        values,
    })
}

/// Whether `(x, d)` gets centered stencils on every axis of the operator.
pub fn frw_lie_interior(field: &FiberSpinorField, x: usize, d: usize) -> bool {
    let xm = field.spacetime.multi_index(x);
    let dm = field.base.multi_index(d);
    let inside = |i: usize, n: usize| i > 0 && i + 1 < n;
    inside(xm[0], field.spacetime.axes[0].len)
        && (1..4).all(|k| inside(dm[k], field.base.axes[k].len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::factorize;
    use crate::fiber::{transport, BaseGrid};
    use crate::geometry::{check_orthonormality, spin_connection, Axis};
    use crate::mat4::Complex64;
    use crate::metric::DiagonalMetric;

    fn t_grid(t0: f64, h: f64, n: usize) -> ChartGrid {
        ChartGrid::new([Axis::new(t0, h, n).unwrap(), Axis::single(0.0), Axis::single(0.0), Axis::single(0.0)])
    }

    fn cube_base(n: usize, s: f64) -> BaseGrid {
        let o = -((n / 2) as f64) * s;
        BaseGrid::new([Axis::single(0.0), Axis::new(o, s, n).unwrap(), Axis::new(o, s, n).unwrap(), Axis::new(o, s, n).unwrap()])
    }

    #[test]
    fn constant_scale_gives_minkowski_tetrad() {
        let (e, g) = frw_tetrad(&ScaleFactor::Constant { c: 1.0 }, &t_grid(0.0, 0.1, 4)).unwrap();
        assert!(e.values.iter().all(|m| *m == Matrix4R::identity()));
        assert!(g.values.iter().all(|m| *m == DiagonalMetric::minkowski().matrix()));
    }

    #[test]
    fn tetrad_is_orthonormal() {
        let (e, g) = frw_tetrad(&ScaleFactor::Power { p: 0.5 }, &t_grid(1.0, 0.25, 6)).unwrap();
        assert!(check_orthonormality(&e, &g, 1e-12).unwrap().max <= 1e-12);
    }

    #[test]
    fn nonpositive_scale_is_rejected() {
        let err = frw_tetrad(&ScaleFactor::Power { p: 2.0 }, &t_grid(-0.5, 0.25, 4));
        assert!(matches!(err, Err(Error::ScaleFactor { .. })));
        assert!(frw_tetrad(&ScaleFactor::Constant { c: -1.0 }, &t_grid(0.0, 0.1, 3)).is_err());
    }

    #[test]
    fn exponential_connection_is_hubble_rate() {
        let h = 0.01;
        let (e, _) = frw_tetrad(&ScaleFactor::Exp { h: 0.3 }, &t_grid(0.0, h, 11)).unwrap();
        let omega = spin_connection(&e).unwrap();
        let expected = frw_generator(&ScaleFactor::Exp { h: 0.3 }, 0.0);
        for i in 0..11 {
            assert!((omega.field.values[i][0] - expected).amax() <= 10.0 * h * h);
        }
    }

    #[test]
    fn power_law_connection_at_two() {
        let p = 1.5;
        let h = 0.01;
        let (e, _) = frw_tetrad(&ScaleFactor::Power { p }, &t_grid(2.0 - 5.0 * h, h, 11)).unwrap();
        let omega = spin_connection(&e).unwrap();
        let w = omega.at([5, 0, 0, 0])[0];
        for i in 1..4 {
            assert!((w[(i, i)] - p / 2.0).abs() <= 10.0 * h * h);
        }
        assert_eq!(w[(0, 0)], 0.0);
    }

    #[test]
    fn equal_times_give_identity_motion() {
        let m = frw_motion(&ScaleFactor::Exp { h: 0.1 }, 0.4, 0.4).unwrap();
        assert_eq!(m, MotionSpec::identity());
    }

    #[test]
    fn motion_factorizes_as_pure_dilatation() {
        let scale = ScaleFactor::Exp { h: 0.2 };
        let m = frw_motion(&scale, 0.0, 1.5).unwrap();
        let r = (0.2f64 * 1.5).exp();
        let t = match m.frames {
            crate::fiber::FrameMap::Uniform(t) => t,
            _ => unreachable!(),
        };
        assert_eq!(t, Matrix4R::from_diagonal(&Vector4::new(1.0, r, r, r)));
        let f = factorize(&t, &DiagonalMetric::minkowski()).unwrap();
        assert_eq!(f.v, Matrix4R::identity());
        assert_eq!(f.u, Matrix4R::identity());
        assert!((f.delta - t).amax() <= 1e-15);
        for k in 1..4 {
            assert!((f.base_shift.delta[k] - 2.0 * 0.3).abs() <= 1e-15);
        }
        assert_eq!(f.base_shift.delta[0], 0.0);
    }

    #[test]
    fn snapping_lands_on_lattice() {
        let scale = ScaleFactor::Exp { h: 0.1 };
        let snap = snap_t2(&scale, 0.0, 1.03, 0.05).unwrap();
        assert_eq!(snap.cells, 4);
        assert!((snap.t2 - 1.0).abs() < 1e-14);
        assert!((snap.distance - 0.03).abs() < 1e-14);

        let power = ScaleFactor::Power { p: 2.0 };
        let snap = snap_t2(&power, 1.0, 1.3, 0.1).unwrap();
        let two_log_r = 2.0 * power.log_ratio(1.0, snap.t2);
        assert!((two_log_r - snap.cells as f64 * 0.1).abs() < 1e-12);
    }

    #[test]
    fn transport_shifts_base_and_time() {
        let scale = ScaleFactor::Exp { h: 0.1 };
        let (ht, s) = (0.5, 0.1); // 2·H·h_t = s
        let st = t_grid(0.0, ht, 4);
        let base = cube_base(5, s);
        let field = FiberSpinorField::from_fn(st, base, |x, d| {
            if x[0] < 0.75 && d.log_abs[1..].iter().all(|l| *l < 0.05) {
                Spinor::from_real([1.0 + x[0], d.log_abs[1], d.log_abs[2], 0.5])
            } else {
                Spinor::zero()
            }
        });
        let moved = transport(&field, &frw_motion(&scale, 0.0, 0.5).unwrap(), &DiagonalMetric::minkowski()).unwrap();
        for x in 0..2 {
            for d in 0..base.len() {
                if let Some(t) = base.offset(base.multi_index(d), [0, 1, 1, 1]) {
                    assert_eq!(moved.get(x + 1, base.index(t)), field.get(x, d));
                }
            }
        }
    }

    #[test]
    fn lie_operator_on_linear_fields() {
        let st = t_grid(0.0, 0.1, 5);
        let base = cube_base(5, 0.2);
        let psi0 = Spinor::new([Complex64::new(1.0, -1.0), Complex64::new(0.5, 0.0), Complex64::new(0.0, 2.0), Complex64::new(-0.25, 0.5)]);
        let constant = FiberSpinorField::from_fn(st, base, |_, _| psi0);
        assert!(frw_lie_operator(&constant).unwrap().values.iter().all(|v| v.0.camax() <= 1e-12));

        let in_time = FiberSpinorField::from_fn(st, base, |x, _| psi0 * x[0]);
        let out = frw_lie_operator(&in_time).unwrap();
        for v in &out.values {
            assert!((v.0 - psi0.0).camax() <= 1e-12);
        }

        let in_base = FiberSpinorField::from_fn(st, base, |_, d| psi0 * (d.log_abs[1] + d.log_abs[2] + d.log_abs[3]));
        let out = frw_lie_operator(&in_base).unwrap();
        for v in &out.values {
            assert!((v.0 - (psi0 * 3.0).0).camax() <= 1e-12);
        }
    }

    #[test]
    fn lie_operator_needs_three_samples() {
        let base = cube_base(5, 0.2);
        let thin = FiberSpinorField::zeros(t_grid(0.0, 0.1, 2), base);
        assert_eq!(frw_lie_operator(&thin), Err(Error::Stencil { axis: 0 }));
        let flat_base = BaseGrid::new([Axis::single(0.0), Axis::new(0.0, 0.1, 3).unwrap(), Axis::single(0.0), Axis::new(0.0, 0.1, 3).unwrap()]);
        let field = FiberSpinorField::zeros(t_grid(0.0, 0.1, 3), flat_base);
        assert_eq!(frw_lie_operator(&field), Err(Error::Stencil { axis: 6 }));
    }
}
