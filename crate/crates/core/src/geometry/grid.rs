use std::ops::{Add, Mul, Sub};

use nalgebra::Vector4;

use crate::clifford::Spinor;
use crate::error::{Error, Result};
use crate::mat4::Matrix4R;

/// One uniformly sampled coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub origin: f64,
    pub spacing: f64,
    pub len: usize,
}

impl Axis {
    pub fn new(origin: f64, spacing: f64, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidGrid("axis has no samples".into()));
        }
        if !(spacing > 0.0 && spacing.is_finite() && origin.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing {spacing} must be positive")));
        }
        Ok(Axis { origin, spacing, len })
    }

    /// A single sample; the spacing only enters cell volumes.
    pub fn single(at: f64) -> Self {
        Axis {
            origin: at,
            spacing: 1.0,
            len: 1,
        }
    }

    /// Validates that `coords` are strictly increasing and uniformly spaced.
    pub fn from_coordinates(coords: &[f64], single_spacing: f64) -> Result<Self> {
        match coords {
            [] => Err(Error::InvalidGrid("axis has no samples".into())),
            [only] => Axis::new(*only, single_spacing, 1),
            [first, second, ..] => {
                let h = second - first;
                if h.is_nan() || h <= 0.0 {
                    return Err(Error::InvalidGrid("coordinates must be strictly increasing".into()));
                }
                for (i, pair) in coords.windows(2).enumerate() {
                    let step = pair[1] - pair[0];
                    if (step - h).abs() > 1e-9 * h.max(pair[1].abs()) {
                        return Err(Error::InvalidGrid(format!(
                            "non-uniform spacing at sample {}",
                            i + 1
                        )));
                    }
                }
                Axis::new(*first, h, coords.len())
            }
        }
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.origin + self.spacing * i as f64
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.coordinate(i)).collect()
    }

    pub fn last(&self) -> f64 {
        self.coordinate(self.len - 1)
    }

    fn matches(&self, other: &Axis) -> bool {
        self.len == other.len
            && (self.origin - other.origin).abs() <= 1e-12 * self.origin.abs().max(1.0)
            && (self.spacing - other.spacing).abs() <= 1e-12 * self.spacing
    }
}

/// A product grid over the chart coordinates `(t, x¹, x², x³)`.
///
/// Points are numbered in axis-major order: the last axis varies fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartGrid {
    pub axes: [Axis; 4],
}

impl ChartGrid {
    pub fn new(axes: [Axis; 4]) -> Self {
        ChartGrid { axes }
    }

    /// A one-point grid.
    pub fn point(x: [f64; 4]) -> Self {
        ChartGrid {
            axes: x.map(Axis::single),
        }
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

    pub fn index(&self, multi: [usize; 4]) -> usize {
        let s = self.shape();
        ((multi[0] * s[1] + multi[1]) * s[2] + multi[2]) * s[3] + multi[3]
    }

    pub fn multi_index(&self, mut index: usize) -> [usize; 4] {
        let s = self.shape();
        let mut out = [0; 4];
        for axis in (0..4).rev() {
            out[axis] = index % s[axis];
            index /= s[axis];
        }
        out
    }

    pub fn coordinates(&self, index: usize) -> [f64; 4] {
        let m = self.multi_index(index);
        std::array::from_fn(|a| self.axes[a].coordinate(m[a]))
    }

    pub fn spacing(&self) -> [f64; 4] {
        self.axes.map(|a| a.spacing)
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing).product()
    }

    /// Moves a multi-index by whole cells; `None` when it leaves the grid.
    pub fn offset(&self, multi: [usize; 4], by: [i64; 4]) -> Option<[usize; 4]> {
        let mut out = [0; 4];
        for a in 0..4 {
            let moved = multi[a] as i64 + by[a];
            if moved < 0 || moved >= self.axes[a].len as i64 {
                return None;
            }
            out[a] = moved as usize;
        }
        Some(out)
    }

    /// Coordinate bounds `[lo, hi]` per axis.
    pub fn bounds(&self) -> ChartBounds {
        ChartBounds {
            lower: self.axes.map(|a| a.origin),
            upper: self.axes.map(|a| a.last()),
        }
    }

    pub fn matches(&self, other: &ChartGrid) -> bool {
        self.axes.iter().zip(&other.axes).all(|(a, b)| a.matches(b))
    }

    pub fn require_match(&self, other: &ChartGrid, what: &str) -> Result<()> {
        if self.matches(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(what.to_string()))
        }
    }
}

/// An axis-aligned box in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartBounds {
    pub lower: [f64; 4],
    pub upper: [f64; 4],
}

impl ChartBounds {
    pub fn unbounded() -> Self {
        ChartBounds {
            lower: [f64::NEG_INFINITY; 4],
            upper: [f64::INFINITY; 4],
        }
    }

    pub fn contains(&self, x: &[f64; 4]) -> bool {
        (0..4).all(|a| x[a] >= self.lower[a] && x[a] <= self.upper[a])
    }
}

/// Values of type `T` sampled at every point of a [`ChartGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    pub grid: ChartGrid,
    pub values: Vec<T>,
}

impl<T> GridField<T> {
    pub fn new(grid: ChartGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridField { grid, values })
    }

    pub fn from_fn(grid: ChartGrid, mut f: impl FnMut([f64; 4]) -> T) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.coordinates(i))).collect();
        GridField { grid, values }
    }

    pub fn at(&self, multi: [usize; 4]) -> &T {
        &self.values[self.grid.index(multi)]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> GridField<U> {
        GridField {
            grid: self.grid,
            values: self.values.iter().map(f).collect(),
        }
    }
}

/// Metric `g^{μν}` sampled on the chart.
pub type CoordinateMetricField = GridField<Matrix4R>;
/// Frame covectors `e^k_μ`: row `k` is the frame index, column `μ` the coordinate index.
pub type TetradField = GridField<Matrix4R>;
/// Components `ζ^μ` of a vector field.
pub type SampledVectorField = GridField<Vector4<f64>>;
pub type SpinorField = GridField<Spinor>;

/// Linear sample types that the stencils can differentiate.
pub trait Sample: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Sample for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

impl Mul<f64> for Spinor {
    type Output = Spinor;

    fn mul(self, rhs: f64) -> Spinor {
        Spinor(self.0 * crate::mat4::Complex64::new(rhs, 0.0))
    }
}

/// Whether a derivative came from the centered stencil or a one-sided one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilKind {
    /// The axis has a single sample; the derivative is taken as zero.
    Flat,
    Central,
    OneSided,
}

/// Second-order finite difference along `axis` at grid point `multi`.
///
/// Interior points use the centered stencil, boundary points the one-sided
/// second-order stencil. An axis with two samples has no second-order
/// stencil and is rejected.
pub fn partial<T: Sample>(
    field: &GridField<T>,
    axis: usize,
    multi: [usize; 4],
) -> Result<(T, StencilKind)> {
    let ax = field.grid.axes[axis];
    stencil(
        |i| {
            let mut m = multi;
            m[axis] = i;
            *field.at(m)
        },
        multi[axis],
        ax.len,
        ax.spacing,
    )
    .ok_or(Error::Stencil { axis })
}

/// Second-order derivative of samples `at(0..n)` with spacing `h`, at `i`.
/// `None` when `n == 2`.
pub(crate) fn stencil<T: Sample>(at: impl Fn(usize) -> T, i: usize, n: usize, h: f64) -> Option<(T, StencilKind)> {
    match n {
        1 => Some((at(0) * 0.0, StencilKind::Flat)),
        2 => None,
        n => Some(if i > 0 && i + 1 < n {
            ((at(i + 1) - at(i - 1)) * (0.5 / h), StencilKind::Central)
        } else if i == 0 {
            let d = at(1) * 4.0 - at(0) * 3.0 - at(2);
            (d * (0.5 / h), StencilKind::OneSided)
        } else {
            let d = at(i) * 3.0 - at(i - 1) * 4.0 + at(i - 2);
            (d * (0.5 / h), StencilKind::OneSided)
        }),
    }
}

/// All four partial derivatives at a point, plus whether any was one-sided.
pub fn gradient<T: Sample>(field: &GridField<T>, multi: [usize; 4]) -> Result<([T; 4], bool)> {
    let mut boundary = false;
    let mut out = [*field.at(multi) * 0.0; 4];
    for (axis, slot) in out.iter_mut().enumerate() {
        let (d, kind) = partial(field, axis, multi)?;
        boundary |= kind == StencilKind::OneSided;
        *slot = d;
    }
    Ok((out, boundary))
}

/// Whether every non-flat axis has the point strictly inside.
pub fn is_interior(grid: &ChartGrid, multi: [usize; 4]) -> bool {
    (0..4).all(|a| grid.axes[a].len == 1 || (multi[a] > 0 && multi[a] + 1 < grid.axes[a].len))
}
