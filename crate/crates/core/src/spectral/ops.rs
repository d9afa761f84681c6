//! Spectral differential operators.

use num_complex::Complex64;

use super::field::{ComplexField, Space};
use crate::error::{Error, Result};

/// `Delta phi` through the symbol `-|xi|^2`. The `-1/2` of the kinetic term is
/// left to callers.
pub fn apply_laplacian(field: &ComplexField) -> Result<ComplexField> {
    field.expect_space(Space::Physical)?;
    let grid = field.grid();
    let mut spec = field.clone().forward()?;
    for (z, k2) in spec.values_mut().iter_mut().zip(grid.wavenumber_sq()) {
        *z *= -k2;
    }
    spec.inverse()
}

/// Spectral partial derivative along `axis` through the symbol `i xi_axis`.
pub fn apply_gradient(field: &ComplexField, axis: usize) -> Result<ComplexField> {
    field.expect_space(Space::Physical)?;
    let grid = field.grid();
    if axis >= grid.dim() {
        return Err(Error::InvalidAxis {
            axis,
            dim: grid.dim(),
        });
    }
    let mut spec = field.clone().forward()?;
    for (z, k) in spec.values_mut().iter_mut().zip(grid.wavevector(axis)) {
        *z *= Complex64::new(0.0, *k);
    }
    spec.inverse()
}

/// `||grad_d phi||^2_{l2}` evaluated from Fourier coefficients (Parseval):
/// `extent^d * sum_xi |xi|^2 |c(xi)|^2`.
pub fn gradient_norm_sq(field: &ComplexField) -> Result<f64> {
    let grid = field.grid();
    let spec = match field.space() {
        Space::Physical => field.clone().forward()?,
        Space::Spectral => field.clone(),
    };
    let sum: f64 = spec
        .values()
        .iter()
        .zip(grid.wavenumber_sq())
        .map(|(z, k2)| k2 * z.norm_sqr())
        .sum();
    Ok(grid.volume() * sum)
}
