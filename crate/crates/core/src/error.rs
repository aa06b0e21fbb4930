use thiserror::Error;

/// Errors raised by the numerical kernels and the field machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric (relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("eigenvalue {re} + {im}i lies on the principal-log branch cut")]
    BranchCut { re: f64, im: f64 },

    #[error("degenerate metric: entry {index} is zero")]
    DegenerateMetric { index: usize },

    #[error("singular transformation (|det| = {det:.3e})")]
    SingularTransform { det: f64 },

    #[error("signature {found:?} is not (+,-,-,-)")]
    Signature { found: [i8; 4] },

    #[error("not an isometry generator of the metric (residual {residual:.3e})")]
    NotAnIsometryGenerator { residual: f64 },

    #[error("not an isometry of the metric (residual {residual:.3e})")]
    NotAnIsometry { residual: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("singular frame at grid point {point}")]
    SingularFrame { point: usize },

    #[error("not enough samples for a stencil along axis {axis}")]
    Stencil { axis: usize },

    #[error("flow left the chart at parameter {at}")]
    FlowEscape { at: f64 },

    #[error("base shift {shift} is not a multiple of spacing {spacing} on axis {axis}")]
    Alignment { axis: usize, shift: f64, spacing: f64 },

    #[error("base shift is not uniform over the field: {0}")]
    NonUniformShift(String),

    #[error("field support reaches the grid boundary: {0}")]
    Support(String),

    #[error("scale factor is not positive at t = {t}")]
    ScaleFactor { t: f64 },

    #[error("base point is not on the base grid")]
    OffGrid,

    #[error("{step} step failed: {source}")]
    Step {
        step: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn in_step(self, step: &'static str) -> Error {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }
}
