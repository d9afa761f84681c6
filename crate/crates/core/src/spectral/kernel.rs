//! Convolution kernels represented by their Fourier symbols.
//!
//! For a kernel `U` on `R^d` the convolution `(U * rho)(x) = integral U(x - y) rho(y) dy`
//! has torus coefficients `U_hat(xi) * c_rho(xi)` where
//! `U_hat(xi) = integral U(x) exp(-i x.xi) dx` is the unnormalised Fourier
//! integral. Symbols are evaluated analytically on the grid wavenumbers, so a
//! narrow kernel on a large box is never periodised.

use std::sync::Arc;

use num_complex::Complex64;

use super::field::{ComplexField, RealField, Space};
use super::grid::SpectralGrid;
use crate::error::{Error, Result};

/// Relative imaginary residue tolerated in a density handed to a convolution.
pub const REAL_DENSITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    /// Normalised indicator of `max_i |x_i| <= width`, scaled by `(2 width)^-d`.
    Box { width: f64 },
    /// `exp(-|x|^2 / width^2) / (width sqrt(pi))^d`.
    Gaussian { width: f64 },
    /// `1 / (2 pi |x|)` in 2D.
    Coulomb2d,
    /// Dipolar interaction potential around a unit dipole axis.
    Dipolar { axis: [f64; 3] },
    /// User-supplied symbol table.
    Table,
}

/// A real, even Fourier multiplier on a fixed grid.
#[derive(Debug, Clone)]
pub struct KernelSymbol {
    kind: KernelKind,
    grid: Arc<SpectralGrid>,
    symbol: Vec<f64>,
}

impl KernelSymbol {
    /// Box kernel of half-width `width`; symbol `prod_i sinc(width xi_i)`.
    pub fn box_kernel(grid: &Arc<SpectralGrid>, width: f64) -> Result<Self> {
        check_width(width)?;
        let symbol = (0..grid.len())
            .map(|i| {
                (0..grid.dim())
                    .map(|a| sinc(width * grid.wavevector(a)[i]))
                    .product()
            })
            .collect();
        Ok(Self {
            kind: KernelKind::Box { width },
            grid: Arc::clone(grid),
            symbol,
        })
    }

    /// Unit-mass Gaussian of width `width`; symbol `exp(-width^2 |xi|^2 / 4)`.
    pub fn gaussian(grid: &Arc<SpectralGrid>, width: f64) -> Result<Self> {
        check_width(width)?;
        let symbol = grid
            .wavenumber_sq()
            .iter()
            .map(|k2| (-width * width * k2 / 4.0).exp())
            .collect();
        Ok(Self {
            kind: KernelKind::Gaussian { width },
            grid: Arc::clone(grid),
            symbol,
        })
    }

    /// Planar Coulomb kernel `1/(2 pi |x|)`, symbol `1/|xi|`. The zero mode is
    /// set to 0, fixing the free additive constant of the potential.
    pub fn coulomb_2d(grid: &Arc<SpectralGrid>) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::Requires2d("the Coulomb kernel"));
        }
        let symbol = grid
            .wavenumber_sq()
            .iter()
            .map(|&k2| if k2 > 0.0 { 1.0 / k2.sqrt() } else { 0.0 })
            .collect();
        Ok(Self {
            kind: KernelKind::Coulomb2d,
            grid: Arc::clone(grid),
            symbol,
        })
    }

    /// Wraps a precomputed symbol table (FFT layout). The table must be even
    /// in the wavenumber.
    pub fn from_table(grid: &Arc<SpectralGrid>, symbol: Vec<f64>) -> Result<Self> {
        Self::with_kind(grid, KernelKind::Table, symbol)
    }

    pub(crate) fn with_kind(grid: &Arc<SpectralGrid>, kind: KernelKind, symbol: Vec<f64>) -> Result<Self> {
        if symbol.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: symbol.len(),
            });
        }
        let mismatch = evenness_defect(grid, &symbol);
        let scale = symbol.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
        if mismatch > 1e-12 * scale {
            return Err(Error::OddSymbol { mismatch });
        }
        Ok(Self {
            kind,
            grid: Arc::clone(grid),
            symbol,
        })
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    /// Symbol values in FFT layout.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// `U * rho` for a real density.
    pub fn convolve(&self, density: &RealField) -> Result<RealField> {
        density.expect_grid(&self.grid)?;
        let mut buf: Vec<Complex64> = density
            .values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.convolve_in_place(&mut buf);
        RealField::from_values(&self.grid, buf.into_iter().map(|z| z.re).collect())
    }

    /// `U * rho` for a density stored as complex data; the imaginary part must
    /// be negligible.
    pub fn convolve_complex(&self, density: &ComplexField) -> Result<RealField> {
        density.expect_space(Space::Physical)?;
        density.expect_grid(&self.grid)?;
        let real = density.to_real(REAL_DENSITY_TOL)?;
        self.convolve(&real)
    }

    /// Multiplies node data by the symbol in Fourier space, in place.
    pub(crate) fn convolve_in_place(&self, buf: &mut [Complex64]) {
        self.grid.forward_in_place(buf);
        for (z, s) in buf.iter_mut().zip(&self.symbol) {
            *z *= s;
        }
        self.grid.inverse_in_place(buf);
    }

    /// Convolution of a real slice, returning real values.
    pub(crate) fn convolve_real(&self, density: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex64> = density.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.convolve_in_place(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }
}

fn check_width(width: f64) -> Result<()> {
    if width.is_finite() && width > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!(
            "kernel width must be positive, got {width}"
        )))
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

// Largest |S(xi) - S(-xi)| over paired modes (the unpaired -J/2 modes map to
// themselves).
fn evenness_defect(grid: &SpectralGrid, symbol: &[f64]) -> f64 {
    let j = grid.modes();
    let mirror = |k: usize| if k == 0 { 0 } else { j - k };
    (0..symbol.len())
        .map(|i| {
            let idx = grid.unflatten(i);
            let m = match grid.dim() {
                1 => mirror(idx[0]),
                _ => mirror(idx[0]) * j + mirror(idx[1]),
            };
            (symbol[i] - symbol[m]).abs()
        })
        .fold(0.0, f64::max)
}
