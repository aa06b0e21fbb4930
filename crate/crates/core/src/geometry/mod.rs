//! Tetrad calculus on a single sampled coordinate chart.
//!
//! Derivatives are second-order finite differences: centered at interior
//! points, one-sided at the boundary (reported back to the caller). Axes with
//! a single sample are treated as directions the field does not depend on.

pub mod grid;
pub mod lie;
pub mod tetrad;

pub use grid::{
    Axis, ChartBounds, ChartGrid, CoordinateMetricField, GridField, SampledVectorField, SpinorField,
    StencilKind, TetradField,
};
pub use lie::{
    flow_exponentiate, lie_derivative_tetrad, transported_frame, ConstantField, FlowResult,
    FnField, FrameField, LinearField, VectorField, VectorSource,
};
pub use tetrad::{
    check_orthonormality, connection_term, covariant_derivative, spin_connection,
    CovariantDerivative, OrthonormalityReport, SpinConnectionField,
};
