//! Lie derivative of a tetrad along a vector field and exponentiation of
//! the induced frame transformation along the flow.

use nalgebra::Vector4;

use crate::error::{Error, Result};
use crate::geometry::grid::{gradient, ChartBounds, GridField, SampledVectorField, TetradField};
use crate::mat4::Matrix4R;

/// A vector field `ζ^μ(x)` given in closed form.
pub trait VectorField {
    fn value(&self, x: &[f64; 4]) -> Vector4<f64>;

    /// `t^μ_ν = ∂ζ^μ/∂x^ν`; central differences unless overridden.
    fn jacobian(&self, x: &[f64; 4]) -> Matrix4R {
        let mut j = Matrix4R::zeros();
        for nu in 0..4 {
            let h = 1e-5 * x[nu].abs().max(1.0);
            let mut plus = *x;
            let mut minus = *x;
            plus[nu] += h;
            minus[nu] -= h;
            let d = (self.value(&plus) - self.value(&minus)) / (2.0 * h);
            j.set_column(nu, &d);
        }
        j
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantField(pub Vector4<f64>);

impl VectorField for ConstantField {
    fn value(&self, _x: &[f64; 4]) -> Vector4<f64> {
        self.0
    }

    fn jacobian(&self, _x: &[f64; 4]) -> Matrix4R {
        Matrix4R::zeros()
    }
}

/// `ζ(x) = M·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearField(pub Matrix4R);

impl VectorField for LinearField {
    fn value(&self, x: &[f64; 4]) -> Vector4<f64> {
        self.0 * Vector4::from(*x)
    }

    fn jacobian(&self, _x: &[f64; 4]) -> Matrix4R {
        self.0
    }
}

/// A vector field from a closure, with an optional closed-form Jacobian.
pub struct FnField<F, J = fn(&[f64; 4]) -> Matrix4R> {
    pub value: F,
    pub jacobian: Option<J>,
}

impl<F> FnField<F> {
    pub fn new(value: F) -> Self {
        FnField {
            value,
            jacobian: None,
        }
    }
}

impl<F, J> VectorField for FnField<F, J>
where
    F: Fn(&[f64; 4]) -> Vector4<f64>,
    J: Fn(&[f64; 4]) -> Matrix4R,
{
    fn value(&self, x: &[f64; 4]) -> Vector4<f64> {
        (self.value)(x)
    }

    fn jacobian(&self, x: &[f64; 4]) -> Matrix4R {
        match &self.jacobian {
            Some(j) => j(x),
            None => {
                let finite = |y: &[f64; 4]| (self.value)(y);
                CentralDifference(&finite).jacobian(x)
            }
        }
    }
}

struct CentralDifference<'a, F>(&'a F);

impl<F: Fn(&[f64; 4]) -> Vector4<f64>> VectorField for CentralDifference<'_, F> {
    fn value(&self, x: &[f64; 4]) -> Vector4<f64> {
        (self.0)(x)
    }
}

/// A frame field `e^k_μ(x)` in closed form.
pub trait FrameField {
    fn frame(&self, x: &[f64; 4]) -> Matrix4R;

    /// `∂_ν e^k_μ`; central differences unless overridden.
    fn partial(&self, x: &[f64; 4], nu: usize) -> Matrix4R {
        let h = 1e-5 * x[nu].abs().max(1.0);
        let mut plus = *x;
        let mut minus = *x;
        plus[nu] += h;
        minus[nu] -= h;
        (self.frame(&plus) - self.frame(&minus)) / (2.0 * h)
    }

    /// `L_ζ e^k_μ = ζ^ν ∂_ν e^k_μ + e^k_ν ∂_μ ζ^ν`.
    fn lie_derivative(&self, zeta: &dyn VectorField, x: &[f64; 4]) -> Matrix4R {
        let z = zeta.value(x);
        let mut out = self.frame(x) * zeta.jacobian(x);
        for nu in 0..4 {
            if z[nu] != 0.0 {
                out += self.partial(x, nu) * z[nu];
            }
        }
        out
    }
}

/// Where the vector field comes from when differentiating a sampled tetrad.
pub enum VectorSource<'a> {
    /// Values and Jacobian evaluated in closed form at the grid points.
    Analytic(&'a dyn VectorField),
    /// Samples on the tetrad's grid, differentiated with stencils.
    Sampled(&'a SampledVectorField),
}

/// Lie derivative of a sampled tetrad, `L_ζ e^k_μ = ζ^ν ∂_ν e^k_μ + e^k_ν ∂_μ ζ^ν`.
pub fn lie_derivative_tetrad(e: &TetradField, zeta: VectorSource<'_>) -> Result<TetradField> {
    if let VectorSource::Sampled(z) = &zeta {
        e.grid.require_match(&z.grid, "tetrad and vector field grids differ")?;
    }
    let grid = e.grid;
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let multi = grid.multi_index(i);
        let x = grid.coordinates(i);
        let (z, jac) = match &zeta {
            VectorSource::Analytic(f) => (f.value(&x), f.jacobian(&x)),
            VectorSource::Sampled(field) => {
                let (d, _) = gradient(*field, multi)?;
                let mut j = Matrix4R::zeros();
                for (nu, col) in d.iter().enumerate() {
                    j.set_column(nu, col);
                }
                (field.values[i], j)
            }
        };
        let (de, _) = gradient(e, multi)?;
        let mut l = e.values[i] * jac;
        for nu in 0..4 {
            l += de[nu] * z[nu];
        }
        values.push(l);
    }
    Ok(GridField { grid, values })
}

/// Endpoint of a flow and the accumulated frame map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowResult {
    pub endpoint: [f64; 4],
    pub frame_map: Matrix4R,
    pub steps: usize,
}

/// Number of RK4 steps for a flow of length `tau`: at least 100, and at
/// most `0.01` in parameter per step.
pub fn flow_steps(tau: f64) -> usize {
    100usize.max((tau.abs() / 0.01).ceil() as usize)
}

/// Integrates `dx/ds = ζ(x)` with `dA/ds = t(x(s))·A`, `A(0) = I`, where
/// `t^μ_ν = ∂ζ^μ/∂x^ν`. For linear `ζ = M·x`, `A(τ) = exp(τM)`.
pub fn flow_exponentiate(
    zeta: &dyn VectorField,
    x0: [f64; 4],
    tau: f64,
    bounds: &ChartBounds,
) -> Result<FlowResult> {
    integrate(x0, tau, bounds, |x| (zeta.value(x), zeta.jacobian(x)))
}

/// Integrates the flow together with the tetrad-frame map `B`,
/// `dB/ds = Z(x(s))·B` with `Z = (L_ζ e)·e⁻¹`, so that
/// `e(x(τ)) ≈ B(τ)·e(x₀)` when the frame is Lie-dragged.
pub fn transported_frame(
    zeta: &dyn VectorField,
    frame: &dyn FrameField,
    x0: [f64; 4],
    tau: f64,
    bounds: &ChartBounds,
) -> Result<FlowResult> {
    let mut singular = None;
    let result = integrate(x0, tau, bounds, |x| {
        let e = frame.frame(x);
        let z = match e.try_inverse() {
            Some(inv) => frame.lie_derivative(zeta, x) * inv,
            None => {
                singular.get_or_insert(*x);
                Matrix4R::zeros()
            }
        };
        (zeta.value(x), z)
    })?;
    if singular.is_some() {
        return Err(Error::SingularFrame { point: 0 });
    }
    Ok(result)
}

fn integrate(
    x0: [f64; 4],
    tau: f64,
    bounds: &ChartBounds,
    mut rhs: impl FnMut(&[f64; 4]) -> (Vector4<f64>, Matrix4R),
) -> Result<FlowResult> {
    if !bounds.contains(&x0) {
        return Err(Error::FlowEscape { at: 0.0 });
    }
    let steps = flow_steps(tau);
    let h = tau / steps as f64;
    let mut x = Vector4::from(x0);
    let mut a = Matrix4R::identity();
    let arr = |v: &Vector4<f64>| [v[0], v[1], v[2], v[3]];

    for n in 0..steps {
        let (k1x, g1) = rhs(&arr(&x));
        let k1a = g1 * a;
        let x2 = x + k1x * (h / 2.0);
        let (k2x, g2) = rhs(&arr(&x2));
        let k2a = g2 * (a + k1a * (h / 2.0));
        let x3 = x + k2x * (h / 2.0);
        let (k3x, g3) = rhs(&arr(&x3));
        let k3a = g3 * (a + k2a * (h / 2.0));
        let x4 = x + k3x * h;
        let (k4x, g4) = rhs(&arr(&x4));
        let k4a = g4 * (a + k3a * h);

        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        a += (k1a + k2a * 2.0 + k3a * 2.0 + k4a) * (h / 6.0);
        if !bounds.contains(&arr(&x)) {
            return Err(Error::FlowEscape {
                at: h * (n + 1) as f64,
            });
        }
    }
    Ok(FlowResult {
        endpoint: arr(&x),
        frame_map: a,
        steps,
    })
}
