//! JSON formats for matrices, metrics, grids and fields.
//!
//! * matrix: `{"rows": [[..4..] ×4]}`, complex entries as `[re, im]`
//! * metric: `{"signs": [1,-1,-1,-1], "log_abs": [..4..]}`
//! * grid: `{"axes": [[coords] ×4], "spacing": [..4..]?}`; `spacing` only
//!   matters for single-sample axes, which otherwise get spacing 1
//! * field: `{"grid": grid, "values": [...]}` with one entry per grid point,
//!   either a flat list in axis-major order (last axis fastest) or arrays
//!   nested along the four axes
//! * fiber field: `{"spacetime_grid": grid, "base_grid": {"log_abs_axes",
//!   "signs", "spacing"?}, "values": [...]}`, flat with the base index
//!   fastest, or nested as `values[x][d]`; single-sample base axes default
//!   to the common lattice spacing
//! * motion: `{"transform": matrix}` or `{"transforms": [matrix per point]}`,
//!   plus optional `"spacetime_translation": [..4..]`

use std::path::Path;

use nalgebra::Vector4;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::clifford::Spinor;
use crate::error::{Error, Result};
use crate::fiber::{BaseGrid, FiberSpinorField, FrameMap, MotionSpec, SpacetimeMap};
use crate::geometry::{Axis, ChartGrid, GridField, SampledVectorField, TetradField};
use crate::mat4::{Complex64, Matrix4C, Matrix4R};
use crate::metric::DiagonalMetric;

fn bad(what: impl Into<String>) -> Error {
    Error::Input(what.into())
}

/// Reads and parses a JSON file, returning it with its SHA-256 digest.
pub fn read_json(path: &Path) -> Result<(Value, String)> {
    let bytes = std::fs::read(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let digest = format!("sha256:{}", hex::encode(Sha256::digest(&bytes)));
    let value = serde_json::from_slice(&bytes).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    Ok((value, digest))
}

fn number(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| bad(format!("{what}: expected a finite number, got {v}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what}: expected an array")))
}

fn fixed<const N: usize>(v: &Value, what: &str) -> Result<[f64; N]> {
    let a = array(v, what)?;
    if a.len() != N {
        return Err(bad(format!("{what}: expected {N} entries, got {}", a.len())));
    }
    let mut out = [0.0; N];
    for (o, x) in out.iter_mut().zip(a) {
        *o = number(x, what)?;
    }
    Ok(out)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field \"{key}\"")))
}

fn complex(v: &Value, what: &str) -> Result<Complex64> {
    if let Some(x) = v.as_f64() {
        return Ok(Complex64::new(number(&json!(x), what)?, 0.0));
    }
    let [re, im] = fixed::<2>(v, what)?;
    Ok(Complex64::new(re, im))
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn rows_of(v: &Value) -> &Value {
    v.get("rows").unwrap_or(v)
}

/// A real 4×4 matrix, either `{"rows": ...}` or the bare row array.
pub fn parse_matrix(v: &Value) -> Result<Matrix4R> {
    let rows = array(rows_of(v), "matrix rows")?;
    if rows.len() != 4 {
        return Err(bad("matrix: expected 4 rows"));
    }
    let mut m = Matrix4R::zeros();
    for (i, row) in rows.iter().enumerate() {
        let r = fixed::<4>(row, "matrix row")?;
        for j in 0..4 {
            m[(i, j)] = r[j];
        }
    }
    Ok(m)
}

pub fn matrix_json(m: &Matrix4R) -> Value {
    json!({ "rows": (0..4).map(|i| (0..4).map(|j| m[(i, j)]).collect::<Vec<_>>()).collect::<Vec<_>>() })
}

pub fn parse_complex_matrix(v: &Value) -> Result<Matrix4C> {
    let rows = array(rows_of(v), "matrix rows")?;
    if rows.len() != 4 {
        return Err(bad("matrix: expected 4 rows"));
    }
    let mut m = Matrix4C::zeros();
    for (i, row) in rows.iter().enumerate() {
        let r = array(row, "matrix row")?;
        if r.len() != 4 {
            return Err(bad("matrix row: expected 4 entries"));
        }
        for j in 0..4 {
            m[(i, j)] = complex(&r[j], "matrix entry")?;
        }
    }
    Ok(m)
}

pub fn complex_matrix_json(m: &Matrix4C) -> Value {
    json!({ "rows": (0..4).map(|i| (0..4).map(|j| complex_json(m[(i, j)])).collect::<Vec<_>>()).collect::<Vec<_>>() })
}

pub fn parse_metric(v: &Value) -> Result<DiagonalMetric> {
    let signs = fixed::<4>(field(v, "signs")?, "signs")?;
    let mut s = [0i8; 4];
    for k in 0..4 {
        s[k] = match signs[k] {
            1.0 => 1,
            -1.0 => -1,
            x => return Err(bad(format!("signs: expected ±1, got {x}"))),
        };
    }
    DiagonalMetric::new(s, fixed::<4>(field(v, "log_abs")?, "log_abs")?)
}

pub fn metric_json(d: &DiagonalMetric) -> Value {
    json!({ "signs": d.signs, "log_abs": d.log_abs })
}

fn parse_axes(axes: &Value, spacing: Option<&Value>) -> Result<[Axis; 4]> {
    let axes = array(axes, "axes")?;
    if axes.len() != 4 {
        return Err(bad("axes: expected 4 coordinate lists"));
    }
    let spacing = match spacing {
        Some(s) => fixed::<4>(s, "spacing")?,
        None => [1.0; 4],
    };
    let mut out = [Axis::single(0.0); 4];
    for k in 0..4 {
        let coords = array(&axes[k], "axis")?
            .iter()
            .map(|x| number(x, "axis coordinate"))
            .collect::<Result<Vec<_>>>()?;
        out[k] = Axis::from_coordinates(&coords, spacing[k])?;
    }
    Ok(out)
}

fn axes_json(axes: &[Axis; 4]) -> (Value, Value) {
    (
        json!(axes.iter().map(|a| a.coordinates()).collect::<Vec<_>>()),
        json!(axes.map(|a| a.spacing)),
    )
}

pub fn parse_grid(v: &Value) -> Result<ChartGrid> {
    Ok(ChartGrid::new(parse_axes(field(v, "axes")?, v.get("spacing"))?))
}

pub fn grid_json(g: &ChartGrid) -> Value {
    let (axes, spacing) = axes_json(&g.axes);
    json!({ "axes": axes, "spacing": spacing })
}

/// Without an explicit `spacing`, single-sample axes take the spacing of
/// the first multi-sample axis, so a uniform lattice has cell volume `s⁴`.
pub fn parse_base_grid(v: &Value) -> Result<BaseGrid> {
    let mut axes = parse_axes(field(v, "log_abs_axes")?, v.get("spacing"))?;
    if v.get("spacing").is_none() {
        if let Some(s) = axes.iter().find(|a| a.len > 1).map(|a| a.spacing) {
            for a in axes.iter_mut().filter(|a| a.len == 1) {
                a.spacing = s;
            }
        }
    }
    let base = BaseGrid::new(axes);
    if let Some(signs) = v.get("signs") {
        let s = fixed::<4>(signs, "signs")?;
        if s != base.signs.map(f64::from) {
            return Err(Error::Signature {
                found: s.map(|x| x.signum() as i8),
            });
        }
    }
    Ok(base)
}

pub fn base_grid_json(b: &BaseGrid) -> Value {
    let (axes, spacing) = axes_json(&b.axes);
    json!({ "log_abs_axes": axes, "signs": b.signs, "spacing": spacing })
}

/// Per-point entries of a field's `values`, flat or nested along `shape`.
fn points<'a>(values: &'a Value, shape: &[usize], is_point: &dyn Fn(&Value) -> bool) -> Result<Vec<&'a Value>> {
    let total: usize = shape.iter().product();
    let list = array(values, "values")?;
    if list.len() == total && list.first().is_none_or(is_point) {
        return Ok(list.iter().collect());
    }
    fn nested<'a>(v: &'a Value, shape: &[usize], out: &mut Vec<&'a Value>) -> Result<()> {
        match shape.split_first() {
            None => out.push(v),
            Some((&n, rest)) => {
                let a = array(v, "values")?;
                if a.len() != n {
                    return Err(bad(format!("values: expected {n} entries along an axis, got {}", a.len())));
                }
                for x in a {
                    nested(x, rest, out)?;
                }
            }
        }
        Ok(())
    }
    let mut out = Vec::with_capacity(total);
    nested(values, shape, &mut out)?;
    Ok(out)
}

fn is_matrix(v: &Value) -> bool {
    v.get("rows").is_some() || v.as_array().is_some_and(|a| a.len() == 4 && a[0].is_array())
}

fn is_vector(v: &Value) -> bool {
    v.as_array().is_some_and(|a| a.len() == 4 && a[0].is_number())
}

fn is_spinor(v: &Value) -> bool {
    v.as_array()
        .is_some_and(|a| a.len() == 4 && (a[0].is_number() || a[0].as_array().is_some_and(|z| z.len() == 2 && z[0].is_number())))
}

pub fn parse_tetrad_field(v: &Value) -> Result<TetradField> {
    let grid = parse_grid(field(v, "grid")?)?;
    let values = points(field(v, "values")?, &grid.shape(), &is_matrix)?
        .into_iter()
        .map(parse_matrix)
        .collect::<Result<Vec<_>>>()?;
    GridField::new(grid, values)
}

pub fn tetrad_field_json(e: &TetradField) -> Value {
    json!({ "grid": grid_json(&e.grid), "values": e.values.iter().map(|m| matrix_json(m)["rows"].clone()).collect::<Vec<_>>() })
}

pub fn parse_sampled_vector_field(v: &Value) -> Result<SampledVectorField> {
    let grid = parse_grid(field(v, "grid")?)?;
    let values = points(field(v, "values")?, &grid.shape(), &is_vector)?
        .into_iter()
        .map(|p| fixed::<4>(p, "vector").map(Vector4::from))
        .collect::<Result<Vec<_>>>()?;
    GridField::new(grid, values)
}

/// A vector field file: sampled, constant, or linear `ζ(x) = A·x`.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorInput {
    Sampled(SampledVectorField),
    Constant(Vector4<f64>),
    Linear(Matrix4R),
}

pub fn parse_vector_input(v: &Value) -> Result<VectorInput> {
    if let Some(c) = v.get("constant") {
        Ok(VectorInput::Constant(Vector4::from(fixed::<4>(c, "constant")?)))
    } else if let Some(a) = v.get("linear") {
        Ok(VectorInput::Linear(parse_matrix(a)?))
    } else {
        parse_sampled_vector_field(v).map(VectorInput::Sampled)
    }
}

pub fn parse_spinor(v: &Value) -> Result<Spinor> {
    let a = array(v, "spinor")?;
    if a.len() != 4 {
        return Err(bad("spinor: expected 4 components"));
    }
    let mut c = [Complex64::new(0.0, 0.0); 4];
    for k in 0..4 {
        c[k] = complex(&a[k], "spinor component")?;
    }
    Ok(Spinor::new(c))
}

pub fn spinor_json(s: &Spinor) -> Value {
    json!(s.0.iter().map(|z| complex_json(*z)).collect::<Vec<_>>())
}

pub fn spinor_field_json(f: &GridField<Spinor>) -> Value {
    json!({ "grid": grid_json(&f.grid), "values": f.values.iter().map(spinor_json).collect::<Vec<_>>() })
}

pub fn parse_spinor_field(v: &Value) -> Result<GridField<Spinor>> {
    let grid = parse_grid(field(v, "grid")?)?;
    let values = points(field(v, "values")?, &grid.shape(), &is_spinor)?
        .into_iter()
        .map(parse_spinor)
        .collect::<Result<Vec<_>>>()?;
    GridField::new(grid, values)
}

pub fn parse_fiber_field(v: &Value) -> Result<FiberSpinorField> {
    let spacetime = parse_grid(field(v, "spacetime_grid")?)?;
    let base = parse_base_grid(field(v, "base_grid")?)?;
    let values = points(field(v, "values")?, &[spacetime.len(), base.len()], &is_spinor)?
        .into_iter()
        .map(parse_spinor)
        .collect::<Result<Vec<_>>>()?;
    FiberSpinorField::new(spacetime, base, values)
}

pub fn fiber_field_json(f: &FiberSpinorField) -> Value {
    json!({
        "spacetime_grid": grid_json(&f.spacetime),
        "base_grid": base_grid_json(&f.base),
        "values": f.values.iter().map(spinor_json).collect::<Vec<_>>(),
    })
}

pub fn parse_motion(v: &Value) -> Result<MotionSpec> {
    let frames = match (v.get("transform"), v.get("transforms")) {
        (Some(t), None) => FrameMap::Uniform(parse_matrix(t)?),
        (None, Some(ts)) => FrameMap::PerPoint(array(ts, "transforms")?.iter().map(parse_matrix).collect::<Result<_>>()?),
        _ => return Err(bad("motion: expected exactly one of \"transform\" or \"transforms\"")),
    };
    let map = match v.get("spacetime_translation") {
        None => SpacetimeMap::Identity,
        Some(t) => match fixed::<4>(t, "spacetime_translation")? {
            [0.0, 0.0, 0.0, 0.0] => SpacetimeMap::Identity,
            t => SpacetimeMap::Translate(t),
        },
    };
    Ok(MotionSpec { map, frames })
}

pub fn motion_json(m: &MotionSpec) -> Value {
    let mut out = match &m.frames {
        FrameMap::Uniform(t) => json!({ "transform": matrix_json(t) }),
        FrameMap::PerPoint(ts) => json!({ "transforms": ts.iter().map(matrix_json).collect::<Vec<_>>() }),
    };
    out["spacetime_translation"] = json!(m.map.displacement());
    out
}
