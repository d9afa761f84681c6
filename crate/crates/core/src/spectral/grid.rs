//! Periodic boxes and their Fourier tables.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// A periodic box `[lower, lower + extent)^d` sampled with `J` nodes per axis.
///
/// Node `j` sits at `lower + j * dx` (the periodic endpoint is not stored).
/// Spectral coefficients are the torus Fourier coefficients
/// `c(xi) = (1/extent^d) * integral(phi(x) exp(-i x.xi) dx)`, approximated by the
/// rectangle rule, so that `phi(x) = sum_xi c(xi) exp(i x.xi)` holds exactly at
/// the nodes. They are stored in FFT layout: wavenumber indices
/// `0, 1, .., J/2-1, -J/2, .., -1` times `2 pi / extent`.
///
/// Multi-dimensional data are row-major: the last axis varies fastest.
pub struct SpectralGrid {
    dim: usize,
    modes: usize,
    lower: Vec<f64>,
    extent: Vec<f64>,
    spacing: Vec<f64>,
    nodes: Vec<Vec<f64>>,
    wavenumbers: Vec<Vec<f64>>,
    // flattened per-axis tables, one entry per grid point
    coord_flat: Vec<Vec<f64>>,
    wavenumber_flat: Vec<Vec<f64>>,
    wavenumber_sq: Vec<f64>,
    forward_factor: Vec<Complex64>,
    inverse_factor: Vec<Complex64>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("dim", &self.dim)
            .field("modes", &self.modes)
            .field("lower", &self.lower)
            .field("extent", &self.extent)
            .finish()
    }
}

impl SpectralGrid {
    /// Builds a grid on the box `prod_i [bounds[i].0, bounds[i].1)` with `modes`
    /// nodes per axis.
    pub fn new(bounds: &[(f64, f64)], modes: usize) -> Result<Self> {
        let dim = bounds.len();
        if !(1..=2).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if modes < 8 || !modes.is_power_of_two() {
            return Err(Error::InvalidModes(modes));
        }
        for &(lower, upper) in bounds {
            if !(lower.is_finite() && upper.is_finite() && upper > lower) {
                return Err(Error::InvalidExtent { lower, upper });
            }
        }

        let lower: Vec<f64> = bounds.iter().map(|b| b.0).collect();
        let extent: Vec<f64> = bounds.iter().map(|b| b.1 - b.0).collect();
        let spacing: Vec<f64> = extent.iter().map(|l| l / modes as f64).collect();
        let nodes: Vec<Vec<f64>> = (0..dim)
            .map(|a| {
                (0..modes)
                    .map(|j| lower[a] + j as f64 * spacing[a])
                    .collect()
            })
            .collect();
        let wavenumbers: Vec<Vec<f64>> = (0..dim)
            .map(|a| {
                let base = 2.0 * PI / extent[a];
                (0..modes)
                    .map(|k| base * signed_index(k, modes) as f64)
                    .collect()
            })
            .collect();

        let len = modes.pow(dim as u32);
        let mut coord_flat = vec![vec![0.0; len]; dim];
        let mut wavenumber_flat = vec![vec![0.0; len]; dim];
        for flat in 0..len {
            let mut rest = flat;
            for a in (0..dim).rev() {
                let idx = rest % modes;
                rest /= modes;
                coord_flat[a][flat] = nodes[a][idx];
                wavenumber_flat[a][flat] = wavenumbers[a][idx];
            }
        }
        let wavenumber_sq: Vec<f64> = (0..len)
            .map(|i| wavenumber_flat.iter().map(|w| w[i] * w[i]).sum())
            .collect();

        // exp(-i lower.xi) / J^d turns a plain DFT into torus coefficients
        let norm = 1.0 / len as f64;
        let forward_factor: Vec<Complex64> = (0..len)
            .map(|i| {
                let phase: f64 = (0..dim).map(|a| lower[a] * wavenumber_flat[a][i]).sum();
                Complex64::from_polar(norm, -phase)
            })
            .collect();
        let inverse_factor: Vec<Complex64> = forward_factor
            .iter()
            .map(|z| z.conj() * len as f64)
            .collect();

        let mut planner = FftPlanner::new();
        let fft_forward = planner.plan_fft_forward(modes);
        let fft_inverse = planner.plan_fft_inverse(modes);

        Ok(Self {
            dim,
            modes,
            lower,
            extent,
            spacing,
            nodes,
            wavenumbers,
            coord_flat,
            wavenumber_flat,
            wavenumber_sq,
            forward_factor,
            inverse_factor,
            fft_forward,
            fft_inverse,
        })
    }

    /// A box of side `extent` centred on the origin in every axis.
    pub fn centered(dim: usize, extent: f64, modes: usize) -> Result<Self> {
        let bounds = vec![(-extent / 2.0, extent / 2.0); dim];
        Self::new(&bounds, modes)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nodes per axis, `J`.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Total number of grid points, `J^d`.
    pub fn len(&self) -> usize {
        self.wavenumber_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent
    }

    /// Mesh size per axis.
    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Rectangle-rule weight of one node, `prod_i dx_i`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Measure of the periodic box, `prod_i extent_i`.
    pub fn volume(&self) -> f64 {
        self.extent.iter().product()
    }

    /// Node coordinates along one axis.
    pub fn nodes(&self, axis: usize) -> &[f64] {
        &self.nodes[axis]
    }

    /// Wavenumbers along one axis in FFT layout.
    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.wavenumbers[axis]
    }

    /// Coordinate along `axis` of every flattened grid point.
    pub fn coordinates(&self, axis: usize) -> &[f64] {
        &self.coord_flat[axis]
    }

    /// Wavenumber along `axis` of every flattened spectral index.
    pub fn wavevector(&self, axis: usize) -> &[f64] {
        &self.wavenumber_flat[axis]
    }

    /// `|xi|^2` for every flattened spectral index.
    pub fn wavenumber_sq(&self) -> &[f64] {
        &self.wavenumber_sq
    }

    /// Physical coordinates of the flattened point `index`.
    pub fn point(&self, index: usize) -> [f64; 2] {
        let mut p = [0.0; 2];
        for (a, slot) in p.iter_mut().enumerate().take(self.dim) {
            *slot = self.coord_flat[a][index];
        }
        p
    }

    /// Splits a flattened index into per-axis indices.
    pub fn unflatten(&self, index: usize) -> [usize; 2] {
        match self.dim {
            1 => [index, 0],
            _ => [index / self.modes, index % self.modes],
        }
    }

    /// Forward transform in place: node values to torus coefficients.
    pub fn forward_in_place(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len(), "buffer does not match grid");
        self.raw_fft(data, &self.fft_forward);
        for (z, f) in data.iter_mut().zip(&self.forward_factor) {
            *z *= f;
        }
    }

    /// Inverse transform in place: torus coefficients to node values.
    pub fn inverse_in_place(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len(), "buffer does not match grid");
        for (z, f) in data.iter_mut().zip(&self.inverse_factor) {
            *z *= f;
        }
        self.raw_fft(data, &self.fft_inverse);
    }

    // Unnormalised multi-dimensional DFT.
    fn raw_fft(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        plan.process(data);
        if self.dim == 2 {
            let n = self.modes;
            let mut scratch = vec![Complex64::default(); data.len()];
            transpose(data, &mut scratch, n);
            plan.process(&mut scratch);
            transpose(&scratch, data, n);
        }
    }
}

fn signed_index(k: usize, modes: usize) -> i64 {
    if k < modes / 2 {
        k as i64
    } else {
        k as i64 - modes as i64
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const BLOCK: usize = 32;
    for ib in (0..n).step_by(BLOCK) {
        for jb in (0..n).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(n) {
                for j in jb..(jb + BLOCK).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}
