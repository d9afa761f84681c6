//! Periodic grids, Fourier transforms and spectral operators.
//!
//! One normalisation is fixed here and used everywhere else: the forward
//! transform produces torus Fourier coefficients (it carries the `1/extent^d`
//! factor of the continuous definition) and the inverse is the plain
//! synthesis sum. With this convention `mass = extent^d * sum |c|^2`.

mod field;
mod grid;
mod kernel;
mod ops;

pub use field::{ComplexField, RealField, Space};
pub use grid::SpectralGrid;
pub use kernel::{KernelKind, KernelSymbol, REAL_DENSITY_TOL};
pub use ops::{apply_gradient, apply_laplacian, gradient_norm_sq};

