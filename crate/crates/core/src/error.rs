use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid modes must be a power of two >= 8, got {0}")]
    InvalidModes(usize),

    #[error("unsupported dimension {0}; only 1D and 2D grids are supported")]
    UnsupportedDimension(usize),

    #[error("box bounds [{lower}, {upper}] do not describe a positive finite extent")]
    InvalidExtent { lower: f64, upper: f64 },

    #[error("field shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field is in {actual} space but {expected} space was required")]
    WrongSpace {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("axis {axis} out of range for a {dim}D grid")]
    InvalidAxis { axis: usize, dim: usize },

    #[error("density is not real: imaginary residue {residue:.3e} relative to its norm")]
    NonRealDensity { residue: f64 },

    #[error("kernel symbol is not even in the wavenumber (mismatch {mismatch:.3e})")]
    OddSymbol { mismatch: f64 },

    #[error("{0} requires a 2D grid")]
    Requires2d(&'static str),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("auxiliary density is negative ({value:.3e}) at point {index}")]
    NegativeAuxiliary { index: usize, value: f64 },

    #[error("{solver} did not converge after {iterations} iterations (last change {residual:.3e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
