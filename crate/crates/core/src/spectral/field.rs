//! Complex and real fields sampled on a [`SpectralGrid`].

use std::sync::Arc;

use num_complex::Complex64;

use super::grid::SpectralGrid;
use crate::error::{Error, Result};

/// Which representation a [`ComplexField`] currently holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// Node values.
    Physical,
    /// Torus Fourier coefficients in FFT layout.
    Spectral,
}

impl Space {
    fn name(self) -> &'static str {
        match self {
            Space::Physical => "physical",
            Space::Spectral => "spectral",
        }
    }
}

/// Complex-valued data on a grid, either as node values or as Fourier
/// coefficients.
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: Arc<SpectralGrid>,
    values: Vec<Complex64>,
    space: Space,
}

impl ComplexField {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![Complex64::default(); grid.len()],
            space: Space::Physical,
        }
    }

    pub fn from_values(grid: &Arc<SpectralGrid>, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
            space,
        })
    }

    /// Samples `f` at every node. The closure receives `[x1, x2]` (unused
    /// trailing coordinates are zero).
    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self {
            grid: Arc::clone(grid),
            values,
            space: Space::Physical,
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn expect_space(&self, expected: Space) -> Result<()> {
        if self.space == expected {
            Ok(())
        } else {
            Err(Error::WrongSpace {
                expected: expected.name(),
                actual: self.space.name(),
            })
        }
    }

    pub(crate) fn expect_grid(&self, grid: &Arc<SpectralGrid>) -> Result<()> {
        if Arc::ptr_eq(&self.grid, grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Node values to Fourier coefficients.
    pub fn forward(mut self) -> Result<Self> {
        self.expect_space(Space::Physical)?;
        self.grid.forward_in_place(&mut self.values);
        self.space = Space::Spectral;
        Ok(self)
    }

    /// Fourier coefficients to node values.
    pub fn inverse(mut self) -> Result<Self> {
        self.expect_space(Space::Spectral)?;
        self.grid.inverse_in_place(&mut self.values);
        self.space = Space::Physical;
        Ok(self)
    }

    /// Pointwise `|phi|^2`.
    pub fn modulus_sq(&self) -> RealField {
        RealField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    /// Drops the imaginary part, failing if it exceeds `tol` relative to the
    /// Euclidean norm of the data.
    pub fn to_real(&self, tol: f64) -> Result<RealField> {
        let residue = imaginary_residue(&self.values);
        if residue > tol {
            return Err(Error::NonRealDensity { residue });
        }
        Ok(RealField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|z| z.re).collect(),
        })
    }
}

/// `||Im v|| / ||v||` (zero for the zero vector).
pub(crate) fn imaginary_residue(values: &[Complex64]) -> f64 {
    let total: f64 = values.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let imag: f64 = values.iter().map(|z| z.im * z.im).sum();
    (imag / total).sqrt()
}

/// Real-valued data on a grid (potentials, densities, auxiliary variables).
#[derive(Debug, Clone)]
pub struct RealField {
    grid: Arc<SpectralGrid>,
    values: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: &Arc<SpectralGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn expect_grid(&self, grid: &Arc<SpectralGrid>) -> Result<()> {
        if Arc::ptr_eq(&self.grid, grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            space: Space::Physical,
        }
    }

    /// Rectangle-rule integral `dx^d * sum_j v_j`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transforms_check_space_flag() {
        let grid = Arc::new(SpectralGrid::centered(1, 1.0, 8).unwrap());
        let field = ComplexField::zeros(&grid);
        let spectral = field.forward().unwrap();
        assert_eq!(spectral.space(), Space::Spectral);
        assert!(matches!(
            spectral.clone().forward(),
            Err(Error::WrongSpace { .. })
        ));
        assert_eq!(spectral.inverse().unwrap().space(), Space::Physical);
    }

    #[test]
    fn shape_is_validated() {
        let grid = Arc::new(SpectralGrid::centered(2, 1.0, 8).unwrap());
        let err = RealField::from_values(&grid, vec![0.0; 8]).unwrap_err();
        assert!(matches!(
            err,
            Error::ShapeMismatch {
                expected: 64,
                actual: 8
            }
        ));
    }

    #[test]
    fn to_real_flags_imaginary_data() {
        let grid = Arc::new(SpectralGrid::centered(1, 1.0, 8).unwrap());
        let field = ComplexField::from_fn(&grid, |_| Complex64::new(1.0, 0.1));
        assert!(field.to_real(1e-12).is_err());
        let field = ComplexField::from_fn(&grid, |_| Complex64::new(1.0, 0.0));
        assert_eq!(field.to_real(1e-12).unwrap().values(), &[1.0; 8]);
    }
}
