//! Spinor fields over spacetime × base and their transport under motions.
//!
//! A motion with frame transformation `T = V·Δ·U` acts on a fiber field in
//! three steps:
//!
//! 1. the spin lift of `U` at the source base point `d`,
//! 2. a translation `d → d + δ` over the base together with `x → m(x)`,
//! 3. the σ(d')-lift of `V` at the target base point `d' = d + δ`.
//!
//! The translation is restricted to whole base-grid cells, so it is an exact
//! permutation of samples. Measures on the base are uniform in the log chart.

use nalgebra::Vector4;
use rayon::prelude::*;

use crate::clifford::{deformed_gammas, norm_density, Spinor};
use crate::decompose::{factorize_with, IsometryFactorization};
use crate::error::{Error, Result};
use crate::geometry::{Axis, ChartGrid, GridField};
use crate::mat4::{Complex64, Matrix4C, Matrix4R};
use crate::metric::{BaseShift, DiagonalMetric, LORENTZ_SIGNS};
use crate::spinlift::{lift_isometry_with, lift_orthogonal};
use crate::tolerance::Tolerances;

/// A product lattice of Lorentzian diagonal metrics, uniform in each
/// log-magnitude coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseGrid {
    pub signs: [i8; 4],
    pub axes: [Axis; 4],
}

impl BaseGrid {
    pub fn new(axes: [Axis; 4]) -> Self {
        BaseGrid {
            signs: LORENTZ_SIGNS,
            axes,
        }
    }

    /// The one-point base `{d}`.
    pub fn single(d: &DiagonalMetric) -> Result<Self> {
        d.require_lorentzian()?;
        Ok(BaseGrid::new(d.log_abs.map(Axis::single)))
    }

    pub fn shape(&self) -> [usize; 4] {
        self.axes.map(|a| a.len)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn as_chart(&self) -> ChartGrid {
        ChartGrid::new(self.axes)
    }

    pub fn index(&self, multi: [usize; 4]) -> usize {
        self.as_chart().index(multi)
    }

    pub fn multi_index(&self, index: usize) -> [usize; 4] {
        self.as_chart().multi_index(index)
    }

    pub fn metric(&self, index: usize) -> DiagonalMetric {
        DiagonalMetric {
            signs: self.signs,
            log_abs: self.as_chart().coordinates(index),
        }
    }

    pub fn spacing(&self) -> [f64; 4] {
        self.axes.map(|a| a.spacing)
    }

    /// Volume of one base cell in the log chart.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing).product()
    }

    /// Grid index of `d`, if it is a lattice point.
    pub fn locate(&self, d: &DiagonalMetric, tol: &Tolerances) -> Option<usize> {
        if d.signs != self.signs {
            return None;
        }
        let mut multi = [0; 4];
        for k in 0..4 {
            let ax = self.axes[k];
            let cells = (d.log_abs[k] - ax.origin) / ax.spacing;
            let nearest = cells.round();
            if (cells - nearest).abs() > tol.lattice * cells.abs().max(1.0)
                || nearest < 0.0
                || nearest >= ax.len as f64
            {
                return None;
            }
            multi[k] = nearest as usize;
        }
        Some(self.index(multi))
    }

    /// Converts a base shift into whole cells per axis.
    pub fn cells(&self, shift: &BaseShift, tol: &Tolerances) -> Result<[i64; 4]> {
        let mut out = [0i64; 4];
        for k in 0..4 {
            let s = self.axes[k].spacing;
            let delta = shift.delta[k];
            let cells = delta / s;
            let nearest = cells.round();
            if (cells - nearest).abs() > tol.lattice * cells.abs().max(1.0) {
                return Err(Error::Alignment {
                    axis: k,
                    shift: delta,
                    spacing: s,
                });
            }
            out[k] = nearest as i64;
        }
        Ok(out)
    }

    pub fn offset(&self, multi: [usize; 4], by: [i64; 4]) -> Option<[usize; 4]> {
        self.as_chart().offset(multi, by)
    }
}

/// Spinor samples `ψ(x; d)` on spacetime grid × base grid.
///
/// Storage is dense with the base index varying fastest:
/// `values[x * base.len() + d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpinorField {
    pub spacetime: ChartGrid,
    pub base: BaseGrid,
    pub values: Vec<Spinor>,
}

impl FiberSpinorField {
    pub fn zeros(spacetime: ChartGrid, base: BaseGrid) -> Self {
        FiberSpinorField {
            spacetime,
            base,
            values: vec![Spinor::zero(); spacetime.len() * base.len()],
        }
    }

    pub fn new(spacetime: ChartGrid, base: BaseGrid, values: Vec<Spinor>) -> Result<Self> {
        if values.len() != spacetime.len() * base.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} × {} samples",
                values.len(),
                spacetime.len(),
                base.len()
            )));
        }
        if values.iter().any(|s| !s.is_finite()) {
            return Err(Error::Input("fiber field values must be finite".into()));
        }
        Ok(FiberSpinorField {
            spacetime,
            base,
            values,
        })
    }

    /// Samples `f(x, d)` at every spacetime and base point.
    pub fn from_fn(
        spacetime: ChartGrid,
        base: BaseGrid,
        mut f: impl FnMut(&[f64; 4], &DiagonalMetric) -> Spinor,
    ) -> Self {
        let mut values = Vec::with_capacity(spacetime.len() * base.len());
        for xi in 0..spacetime.len() {
            let x = spacetime.coordinates(xi);
            for di in 0..base.len() {
                values.push(f(&x, &base.metric(di)));
            }
        }
        FiberSpinorField {
            spacetime,
            base,
            values,
        }
    }

    pub fn slot(&self, x: usize, d: usize) -> usize {
        x * self.base.len() + d
    }

    pub fn get(&self, x: usize, d: usize) -> &Spinor {
        &self.values[self.slot(x, d)]
    }

    pub fn set(&mut self, x: usize, d: usize, value: Spinor) {
        let slot = self.slot(x, d);
        self.values[slot] = value;
    }

    fn same_layout(&self, other: &FiberSpinorField) -> bool {
        self.spacetime.matches(&other.spacetime) && self.base == other.base
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &FiberSpinorField, b: Complex64) -> Result<FiberSpinorField> {
        if !self.same_layout(other) {
            return Err(Error::GridMismatch("fiber fields have different grids".into()));
        }
        Ok(FiberSpinorField {
            spacetime: self.spacetime,
            base: self.base,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(p, q)| p.scale(a) + q.scale(b))
                .collect(),
        })
    }

    /// Base indices carrying any nonzero sample.
    pub fn base_support(&self) -> Vec<usize> {
        let nb = self.base.len();
        (0..nb)
            .filter(|&d| (0..self.spacetime.len()).any(|x| self.values[x * nb + d] != Spinor::zero()))
            .collect()
    }
}

/// Where a motion sends spacetime points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpacetimeMap {
    Identity,
    /// Translation by a fixed coordinate displacement; on a grid it must be
    /// a whole number of cells per axis.
    Translate([f64; 4]),
}

impl SpacetimeMap {
    pub fn displacement(&self) -> [f64; 4] {
        match self {
            SpacetimeMap::Identity => [0.0; 4],
            SpacetimeMap::Translate(v) => *v,
        }
    }

    pub fn then(&self, next: &SpacetimeMap) -> SpacetimeMap {
        match (self, next) {
            (SpacetimeMap::Identity, m) | (m, SpacetimeMap::Identity) => *m,
            (a, b) => {
                let (a, b) = (a.displacement(), b.displacement());
                SpacetimeMap::Translate(std::array::from_fn(|k| a[k] + b[k]))
            }
        }
    }

    /// The displacement in whole cells of `grid`.
    pub fn cells(&self, grid: &ChartGrid, tol: &Tolerances) -> Result<[i64; 4]> {
        let v = self.displacement();
        let mut out = [0i64; 4];
        for k in 0..4 {
            let h = grid.axes[k].spacing;
            let cells = v[k] / h;
            let nearest = cells.round();
            if (cells - nearest).abs() > tol.lattice * cells.abs().max(1.0) {
                return Err(Error::Alignment {
                    axis: k,
                    shift: v[k],
                    spacing: h,
                });
            }
            out[k] = nearest as i64;
        }
        Ok(out)
    }
}

/// Frame transformation `T` of a motion: one matrix, or one per spacetime point.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameMap {
    Uniform(Matrix4R),
    PerPoint(Vec<Matrix4R>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionSpec {
    pub map: SpacetimeMap,
    pub frames: FrameMap,
}

impl MotionSpec {
    pub fn identity() -> Self {
        MotionSpec {
            map: SpacetimeMap::Identity,
            frames: FrameMap::Uniform(Matrix4R::identity()),
        }
    }

    pub fn uniform(t: Matrix4R, map: SpacetimeMap) -> Self {
        MotionSpec {
            map,
            frames: FrameMap::Uniform(t),
        }
    }

    pub fn frame_count(&self) -> usize {
        match &self.frames {
            FrameMap::Uniform(_) => 1,
            FrameMap::PerPoint(v) => v.len(),
        }
    }

    fn frame_index(&self, x: usize) -> usize {
        match &self.frames {
            FrameMap::Uniform(_) => 0,
            FrameMap::PerPoint(_) => x,
        }
    }

    /// Frame matrix `i`; uniform motions have only frame 0.
    pub fn frame(&self, i: usize) -> &Matrix4R {
        match &self.frames {
            FrameMap::Uniform(t) => t,
            FrameMap::PerPoint(v) => &v[i],
        }
    }
}

/// Multiplies `ψ(x; d)` by `lift(x, d)` wherever it returns a matrix.
fn apply_fiberwise(
    field: &FiberSpinorField,
    lift: impl Fn(usize, usize) -> Option<Matrix4C> + Sync,
) -> FiberSpinorField {
    let nb = field.base.len();
    let values = field
        .values
        .par_iter()
        .enumerate()
        .map(|(slot, psi)| match lift(slot / nb, slot % nb) {
            Some(s) => psi.apply(&s),
            None => *psi,
        })
        .collect();
    FiberSpinorField {
        spacetime: field.spacetime,
        base: field.base,
        values,
    }
}

/// Right isometry step: `ψ(x; d) → S_d(U)·ψ(x; d)` at the factorization's
/// source point, for every `x`.
pub fn step_right_isometry(
    field: &FiberSpinorField,
    f: &IsometryFactorization,
) -> Result<FiberSpinorField> {
    step_right_isometry_with(field, f, &Tolerances::default())
}

pub fn step_right_isometry_with(
    field: &FiberSpinorField,
    f: &IsometryFactorization,
    tol: &Tolerances,
) -> Result<FiberSpinorField> {
    let at = field.base.locate(&f.source, tol).ok_or(Error::OffGrid)?;
    let s = lift_isometry_with(&f.u, &field.base.metric(at), tol)?.matrix;
    Ok(apply_fiberwise(field, |_, d| (d == at).then_some(s)))
}

/// Left isometry step: multiplies `ψ(x; d')` by the σ(d')-lift of `V` at
/// the factorization's target point, for every `x`.
pub fn step_left_isometry(
    field: &FiberSpinorField,
    f: &IsometryFactorization,
) -> Result<FiberSpinorField> {
    step_left_isometry_with(field, f, &Tolerances::default())
}

pub fn step_left_isometry_with(
    field: &FiberSpinorField,
    f: &IsometryFactorization,
    tol: &Tolerances,
) -> Result<FiberSpinorField> {
    let at = field.base.locate(&f.target, tol).ok_or(Error::OffGrid)?;
    let s = lift_orthogonal(&f.v, &field.base.metric(at), tol)?.matrix;
    Ok(apply_fiberwise(field, |_, d| (d == at).then_some(s)))
}

/// Translation step: `ψ'(m(x); d + δ) = ψ(x; d)`.
///
/// `δ` must be a whole number of base cells per axis. A nonzero sample that
/// would leave either grid is an error; vacated samples become zero.
pub fn step_translate(
    field: &FiberSpinorField,
    shift: &BaseShift,
    map: &SpacetimeMap,
) -> Result<FiberSpinorField> {
    step_translate_with(field, shift, map, &Tolerances::default())
}

pub fn step_translate_with(
    field: &FiberSpinorField,
    shift: &BaseShift,
    map: &SpacetimeMap,
    tol: &Tolerances,
) -> Result<FiberSpinorField> {
    let cells = field.base.cells(shift, tol)?;
    let offset = map.cells(&field.spacetime, tol)?;
    translate_cells(field, cells, offset)
}

fn translate_cells(
    field: &FiberSpinorField,
    cells: [i64; 4],
    offset: [i64; 4],
) -> Result<FiberSpinorField> {
    let st = field.spacetime;
    let base = field.base;
    let nb = base.len();
    let mut out = FiberSpinorField::zeros(st, base);
    for x in 0..st.len() {
        let y = st.offset(st.multi_index(x), offset).map(|m| st.index(m));
        for d in 0..nb {
            let value = field.values[x * nb + d];
            let target = base.offset(base.multi_index(d), cells).map(|m| base.index(m));
            match (y, target) {
                (Some(y), Some(t)) => out.values[y * nb + t] = value,
                _ if value == Spinor::zero() => {}
                (None, _) => {
                    return Err(Error::Support(format!(
                        "nonzero sample at spacetime point {x} leaves the spacetime grid"
                    )))
                }
                (_, None) => {
                    return Err(Error::Support(format!(
                        "nonzero sample at base point {d} leaves the base grid"
                    )))
                }
            }
        }
    }
    Ok(out)
}

/// Everything needed to transport fields on one pair of grids under one
/// motion: the per-sample factorizations, the common base shift, and the
/// two families of spin lifts.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    pub motion: MotionSpec,
    pub reference: IsometryFactorization,
    pub cells: [i64; 4],
    /// Spacetime displacement in grid cells.
    pub offset: [i64; 4],
    /// `factors[frame][d]`: factorization of frame `frame` at base point `d`.
    pub factors: Vec<Vec<IsometryFactorization>>,
    right: Vec<Vec<Matrix4C>>,
    /// `left[frame][d]`: σ-lift of `V` from source `d`, taken at `d + δ`.
    left: Vec<Vec<Option<Matrix4C>>>,
    spacetime: ChartGrid,
    base: BaseGrid,
}

impl TransportPlan {
    pub fn new(
        field: &FiberSpinorField,
        motion: &MotionSpec,
        reference_metric: &DiagonalMetric,
        tol: &Tolerances,
    ) -> Result<Self> {
        let st = field.spacetime;
        let base = field.base;
        if let FrameMap::PerPoint(frames) = &motion.frames {
            if frames.len() != st.len() {
                return Err(Error::GridMismatch(format!(
                    "{} frame matrices for {} spacetime points",
                    frames.len(),
                    st.len()
                )));
            }
        }
        let reference = factorize_with(motion.frame(0), reference_metric, tol)?;
        let cells = base.cells(&reference.base_shift, tol)?;
        let offset = motion.map.cells(&st, tol)?;
        let spacing = base.spacing();

        let factors = (0..motion.frame_count())
            .into_par_iter()
            .map(|frame| {
                (0..base.len())
                    .map(|d| factorize_with(motion.frame(frame), &base.metric(d), tol))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        for (frame, row) in factors.iter().enumerate() {
            for (d, f) in row.iter().enumerate() {
                for k in 0..4 {
                    let expected = cells[k] as f64 * spacing[k];
                    if (f.base_shift.delta[k] - expected).abs() > tol.lattice * spacing[k].max(1.0) {
                        return Err(Error::NonUniformShift(format!(
                            "frame {frame}, base point {d}, axis {k}: {} vs {expected}",
                            f.base_shift.delta[k]
                        )));
                    }
                }
            }
        }

        let right = factors
            .par_iter()
            .map(|row| {
                row.iter()
                    .map(|f| lift_isometry_with(&f.u, &f.source, tol).map(|s| s.matrix))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.in_step("right isometry"))?;

        let left = factors
            .par_iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(d, f)| match base.offset(base.multi_index(d), cells) {
                        Some(t) => {
                            let target = base.metric(base.index(t));
                            lift_orthogonal(&f.v, &target, tol).map(|s| Some(s.matrix))
                        }
                        None => Ok(None),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.in_step("left isometry"))?;

        Ok(TransportPlan {
            motion: motion.clone(),
            reference,
            cells,
            offset,
            factors,
            right,
            left,
            spacetime: st,
            base,
        })
    }

    fn check_layout(&self, field: &FiberSpinorField) -> Result<()> {
        if field.spacetime.matches(&self.spacetime) && field.base == self.base {
            Ok(())
        } else {
            Err(Error::GridMismatch("field does not match the transport plan".into()))
        }
    }

    pub fn base_shift(&self) -> BaseShift {
        let s = self.base.spacing();
        BaseShift::new(std::array::from_fn(|k| self.cells[k] as f64 * s[k]))
    }

    /// Step 1: `ψ(x; d) → S_d(U(x, d))·ψ(x; d)`.
    pub fn right_step(&self, field: &FiberSpinorField) -> Result<FiberSpinorField> {
        self.check_layout(field)?;
        Ok(apply_fiberwise(field, |x, d| {
            Some(self.right[self.motion.frame_index(x)][d])
        }))
    }

    /// Step 2: `ψ'(m(x); d + δ) = ψ(x; d)`.
    pub fn translate_step(&self, field: &FiberSpinorField) -> Result<FiberSpinorField> {
        self.check_layout(field)?;
        translate_cells(field, self.cells, self.offset).map_err(|e| e.in_step("translation"))
    }

    /// Step 3: at `(y, d')`, the lift of `V` from the factorization of
    /// `T(y)` at the source point `d' − δ`.
    pub fn left_step(&self, field: &FiberSpinorField) -> Result<FiberSpinorField> {
        self.check_layout(field)?;
        let back = self.cells.map(|c| -c);
        Ok(apply_fiberwise(field, |y, d| {
            let source = self.base.offset(self.base.multi_index(d), back)?;
            self.left[self.motion.frame_index(y)][self.base.index(source)]
        }))
    }

    pub fn apply(&self, field: &FiberSpinorField) -> Result<FiberSpinorField> {
        let moved = self.right_step(field)?;
        let moved = self.translate_step(&moved)?;
        self.left_step(&moved)
    }
}

pub fn transport(
    field: &FiberSpinorField,
    motion: &MotionSpec,
    reference_metric: &DiagonalMetric,
) -> Result<FiberSpinorField> {
    transport_with(field, motion, reference_metric, &Tolerances::default())
}

/// Transports a fiber field under a motion.
///
/// The factorization of the motion at `reference_metric` fixes the base
/// shift, which must agree with the factorization at every base point (and
/// every spacetime point for per-point frames) and be lattice aligned.
pub fn transport_with(
    field: &FiberSpinorField,
    motion: &MotionSpec,
    reference_metric: &DiagonalMetric,
    tol: &Tolerances,
) -> Result<FiberSpinorField> {
    TransportPlan::new(field, motion, reference_metric, tol)?.apply(field)
}

/// `Σ_{x,d} ψ̄ψ(x; d)` times the spacetime and base cell volumes.
pub fn total_norm(field: &FiberSpinorField) -> f64 {
    let nb = field.base.len();
    let scales: Vec<f64> = (0..nb)
        .map(|d| {
            let metric = field.base.metric(d);
            deformed_gammas(&metric)
                .map(|rep| norm_density(&rep, &Spinor::from_real([1.0, 0.0, 0.0, 0.0])))
                .unwrap_or(f64::NAN)
        })
        .collect();
    let mut sum = 0.0;
    for (slot, psi) in field.values.iter().enumerate() {
        let v = psi.0;
        let density = v[0].norm_sqr() + v[1].norm_sqr() - v[2].norm_sqr() - v[3].norm_sqr();
        sum += scales[slot % nb] * density;
    }
    sum * field.base.cell_volume() * field.spacetime.cell_volume()
}

/// `ψ(x) = Σ_d ψ(x; d)·(base cell volume)`: midpoint quadrature over the base.
pub fn aggregate(field: &FiberSpinorField) -> GridField<Spinor> {
    let nb = field.base.len();
    let volume = Complex64::new(field.base.cell_volume(), 0.0);
    let values = field
        .values
        .chunks(nb)
        .map(|row| {
            let sum = row.iter().fold(Vector4::zeros(), |acc, s| acc + s.0);
            Spinor(sum * volume)
        })
        .collect();
    GridField {
        grid: field.spacetime,
        values,
    }
}
