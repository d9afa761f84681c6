#![allow(dead_code)]

use std::sync::Arc;

use nlsrelax_core::spectral::{ComplexField, SpectralGrid};
use nlsrelax_core::Complex64;
use proptest::prelude::*;

/// Complex amplitude, center and width of one Gaussian bump.
pub type Bump = (f64, f64, f64, f64);

pub fn grid1(half: f64, modes: usize) -> Arc<SpectralGrid> {
    Arc::new(SpectralGrid::new(&[(-half, half)], modes).unwrap())
}

pub fn grid2(half: f64, modes: usize) -> Arc<SpectralGrid> {
    Arc::new(SpectralGrid::new(&[(-half, half), (-half, half)], modes).unwrap())
}

pub fn bumps(max: usize) -> impl Strategy<Value = Vec<Bump>> {
    prop::collection::vec((-1.0..1.0, -1.0..1.0, -2.0..2.0, 0.8..1.6), 1..=max)
}

/// Sum of Gaussian bumps; on 2D grids each bump is offset diagonally and
/// carries a phase ramp so that the field is not radial.
pub fn smooth_field(grid: &Arc<SpectralGrid>, bumps: &[Bump]) -> ComplexField {
    let dim = grid.dim();
    ComplexField::from_fn(grid, |p| {
        bumps
            .iter()
            .map(|&(re, im, c, w)| {
                let r2: f64 = (0..dim)
                    .map(|a| {
                        let shift = if a == 0 { c } else { -0.5 * c };
                        (p[a] - shift).powi(2)
                    })
                    .sum();
                let ramp = Complex64::from_polar(1.0, 0.3 * c * p[dim - 1]);
                Complex64::new(re, im) * ramp * (-r2 / (w * w)).exp()
            })
            .sum()
    })
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
