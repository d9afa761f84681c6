//! Right-hand side of the Gross-Pitaevskii equation
//!
//! ```text
//! i d/dt phi = ( -1/2 Delta + V + beta |phi|^(2 sigma) + lambda (U * |phi|^2) - Omega L ) phi
//! ```
//!
//! where `L = -i (x1 d/dx2 - x2 d/dx1)` is the planar angular momentum. The
//! dipolar interaction is expressed as a convolution whose symbol is built
//! by [`dipolar_symbol`], so it plugs into the same `lambda (U * rho)` slot.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{ComplexField, KernelKind, KernelSymbol, RealField, Space, SpectralGrid};

/// Parameters of the equation. Immutable once built.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    beta: f64,
    sigma: u32,
    lambda: f64,
    kernel: Option<Arc<KernelSymbol>>,
    potential: Option<RealField>,
    omega: f64,
    dipole_axis: Option<[f64; 3]>,
    trap: Option<(f64, f64)>,
}

impl ModelSpec {
    /// Local power nonlinearity `beta |phi|^(2 sigma)` with no other terms.
    pub fn new(beta: f64, sigma: u32) -> Result<Self> {
        if sigma == 0 {
            return Err(Error::InvalidModel("sigma must be a positive integer".into()));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidModel(format!("beta must be finite, got {beta}")));
        }
        Ok(Self {
            beta,
            sigma,
            lambda: 0.0,
            kernel: None,
            potential: None,
            omega: 0.0,
            dipole_axis: None,
            trap: None,
        })
    }

    /// Competing nonlocal cubic / local quintic model
    /// `d/dt phi = i (1/2 Delta + alpha1 U * |phi|^2 + alpha2 |phi|^4) phi`,
    /// i.e. `lambda = -alpha1`, `beta = -alpha2`, `sigma = 2`.
    pub fn cubic_quintic(alpha1: f64, alpha2: f64, kernel: Option<Arc<KernelSymbol>>) -> Result<Self> {
        let model = Self::new(-alpha2, 2)?;
        match kernel {
            Some(kernel) => model.with_nonlocal(-alpha1, kernel),
            None if alpha1 == 0.0 => Ok(model),
            None => Err(Error::InvalidModel(
                "alpha1 != 0 requires a convolution kernel".into(),
            )),
        }
    }

    /// Adds `lambda (U * |phi|^2)`.
    pub fn with_nonlocal(mut self, lambda: f64, kernel: Arc<KernelSymbol>) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidModel(format!(
                "a convolution kernel needs a finite nonzero strength, got lambda = {lambda}"
            )));
        }
        self.lambda = lambda;
        self.kernel = Some(kernel);
        self.dipole_axis = None;
        Ok(self)
    }

    /// Adds the dipolar potential `lambda psi` for a unit dipole axis `n`.
    pub fn with_dipolar(self, lambda: f64, grid: &Arc<SpectralGrid>, axis: [f64; 3]) -> Result<Self> {
        let kernel = Arc::new(dipolar_symbol(grid, axis)?);
        let mut model = self.with_nonlocal(lambda, kernel)?;
        model.dipole_axis = Some(axis);
        Ok(model)
    }

    pub fn with_potential(mut self, potential: RealField) -> Self {
        self.potential = Some(potential);
        self
    }

    /// Adds the trap `(gx1^2 x1^2 + gx2^2 x2^2) / 2`.
    pub fn with_harmonic_trap(mut self, grid: &Arc<SpectralGrid>, gx1: f64, gx2: f64) -> Result<Self> {
        self.potential = Some(harmonic_potential(grid, gx1, gx2)?);
        self.trap = Some((gx1, gx2));
        Ok(self)
    }

    /// Adds the rotation term `-Omega L`. Only meaningful on 2D grids.
    pub fn with_rotation(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    /// Checks that every grid-bound ingredient lives on `grid`.
    pub fn validate_for(&self, grid: &Arc<SpectralGrid>) -> Result<()> {
        if let Some(kernel) = &self.kernel {
            if !Arc::ptr_eq(kernel.grid(), grid) {
                return Err(Error::GridMismatch);
            }
        }
        if let Some(v) = &self.potential {
            v.expect_grid(grid)?;
        }
        if self.omega != 0.0 && grid.dim() != 2 {
            return Err(Error::Requires2d("rotation"));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kernel(&self) -> Option<&Arc<KernelSymbol>> {
        self.kernel.as_ref()
    }

    pub fn potential(&self) -> Option<&RealField> {
        self.potential.as_ref()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn dipole_axis(&self) -> Option<[f64; 3]> {
        self.dipole_axis
    }

    pub fn trap(&self) -> Option<(f64, f64)> {
        self.trap
    }

    /// `(U * rho)` scaled by lambda, or `None` without a nonlocal term.
    pub(crate) fn nonlocal_potential(&self, density: &[f64]) -> Option<Vec<f64>> {
        self.kernel.as_ref().map(|k| {
            let mut conv = k.convolve_real(density);
            for v in &mut conv {
                *v *= self.lambda;
            }
            conv
        })
    }

    /// Applies the full Hamiltonian of the continuous equation to `phi`:
    /// `(-1/2 Delta + V + beta |phi|^(2 sigma) + lambda U * |phi|^2 - Omega L) phi`.
    pub fn apply_hamiltonian(&self, phi: &ComplexField) -> Result<ComplexField> {
        phi.expect_space(Space::Physical)?;
        let grid = phi.grid();
        self.validate_for(grid)?;
        let density: Vec<f64> = phi.values().iter().map(|z| z.norm_sqr()).collect();
        let mut w: Vec<f64> = density
            .iter()
            .map(|r| self.beta * r.powi(self.sigma as i32))
            .collect();
        if let Some(v) = &self.potential {
            add_assign(&mut w, v.values());
        }
        if let Some(conv) = self.nonlocal_potential(&density) {
            add_assign(&mut w, &conv);
        }
        let mut spec = phi.values().to_vec();
        grid.forward_in_place(&mut spec);
        let mut out = spec.clone();
        for (z, k2) in out.iter_mut().zip(grid.wavenumber_sq()) {
            *z *= 0.5 * k2;
        }
        grid.inverse_in_place(&mut out);
        for ((o, u), wi) in out.iter_mut().zip(phi.values()).zip(&w) {
            *o += u * wi;
        }
        if self.omega != 0.0 {
            let rot = rotation_from_spectrum(grid, &spec);
            for (o, r) in out.iter_mut().zip(rot) {
                *o -= r * self.omega;
            }
        }
        ComplexField::from_values(grid, out, Space::Physical)
    }
}

fn add_assign(acc: &mut [f64], other: &[f64]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

/// `V(x) = (gx1^2 x1^2 + gx2^2 x2^2) / 2` sampled at the nodes of a 2D grid.
pub fn harmonic_potential(grid: &Arc<SpectralGrid>, gx1: f64, gx2: f64) -> Result<RealField> {
    if grid.dim() != 2 {
        return Err(Error::Requires2d("the harmonic trap"));
    }
    Ok(RealField::from_fn(grid, |p| {
        (gx1 * gx1 * p[0] * p[0] + gx2 * gx2 * p[1] * p[1]) / 2.0
    }))
}

/// Planar angular momentum `L phi = -i (x1 d/dx2 - x2 d/dx1) phi` with
/// spectral derivatives.
pub fn apply_rotation(field: &ComplexField) -> Result<ComplexField> {
    field.expect_space(Space::Physical)?;
    let grid = field.grid();
    if grid.dim() != 2 {
        return Err(Error::Requires2d("the rotation operator"));
    }
    let mut spec = field.values().to_vec();
    grid.forward_in_place(&mut spec);
    ComplexField::from_values(grid, rotation_from_spectrum(grid, &spec), Space::Physical)
}

/// `L u` given the Fourier coefficients of `u`.
pub(crate) fn rotation_from_spectrum(grid: &SpectralGrid, spec: &[Complex64]) -> Vec<Complex64> {
    let mut d1: Vec<Complex64> = spec
        .iter()
        .zip(grid.wavevector(0))
        .map(|(z, k)| z * Complex64::new(0.0, *k))
        .collect();
    let mut d2: Vec<Complex64> = spec
        .iter()
        .zip(grid.wavevector(1))
        .map(|(z, k)| z * Complex64::new(0.0, *k))
        .collect();
    grid.inverse_in_place(&mut d1);
    grid.inverse_in_place(&mut d2);
    let x1 = grid.coordinates(0);
    let x2 = grid.coordinates(1);
    d1.iter()
        .zip(&d2)
        .zip(x1.iter().zip(x2))
        .map(|((a, b), (y1, y2))| {
            let inner = b * *y1 - a * *y2;
            Complex64::new(inner.im, -inner.re)
        })
        .collect()
}

/// Fourier symbol of the planar dipolar potential
/// `psi = -3/2 (d_{n_perp n_perp} - n3^2 Delta)(1/(2 pi |x|) * rho)`:
/// `S(xi) = 3/2 ((n_perp . xi)^2 - n3^2 |xi|^2) / |xi|`, with `S(0) = 0`.
pub fn dipolar_symbol(grid: &Arc<SpectralGrid>, axis: [f64; 3]) -> Result<KernelSymbol> {
    if grid.dim() != 2 {
        return Err(Error::Requires2d("the dipolar potential"));
    }
    let norm = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidModel(format!(
            "dipole axis must have unit length, got |n| = {norm}"
        )));
    }
    let [n1, n2, n3] = axis;
    let nyquist = grid.modes() / 2;
    let symbol = (0..grid.len())
        .map(|i| {
            let k2 = grid.wavenumber_sq()[i];
            if k2 == 0.0 {
                return 0.0;
            }
            let (k1, k2b) = (grid.wavevector(0)[i], grid.wavevector(1)[i]);
            let idx = grid.unflatten(i);
            // the unpaired -J/2 mode has no mirror, so the odd cross term is
            // dropped there to keep the symbol even
            let cross = if idx[0] == nyquist || idx[1] == nyquist {
                0.0
            } else {
                2.0 * n1 * n2 * k1 * k2b
            };
            let proj_sq = n1 * n1 * k1 * k1 + n2 * n2 * k2b * k2b + cross;
            1.5 * (proj_sq - n3 * n3 * k2) / k2.sqrt()
        })
        .collect();
    KernelSymbol::with_kind(grid, KernelKind::Dipolar { axis }, symbol)
}

/// Dipolar potential `psi` generated by a real density.
pub fn dipolar_psi(density: &RealField, axis: [f64; 3]) -> Result<RealField> {
    dipolar_symbol(density.grid(), axis)?.convolve(density)
}

/// Pointwise `|phi|^(2 sigma)`.
pub fn nonlinear_density(phi: &ComplexField, sigma: u32) -> RealField {
    let mut rho = phi.modulus_sq();
    for v in rho.values_mut() {
        *v = v.powi(sigma as i32);
    }
    rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{apply_gradient, apply_laplacian};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid2(extent: f64, modes: usize) -> Arc<SpectralGrid> {
        Arc::new(SpectralGrid::centered(2, extent, modes).unwrap())
    }

    fn index_of(grid: &SpectralGrid, x1: f64, x2: f64) -> usize {
        (0..grid.len())
            .find(|&i| {
                let p = grid.point(i);
                (p[0] - x1).abs() < 1e-12 && (p[1] - x2).abs() < 1e-12
            })
            .expect("node not on grid")
    }

    #[test]
    fn harmonic_potential_at_nodes() {
        let grid = grid2(16.0, 16);
        let v = harmonic_potential(&grid, 1.0, 1.0).unwrap();
        assert_eq!(v.values()[index_of(&grid, 0.0, 0.0)], 0.0);
        assert_eq!(v.values()[index_of(&grid, 1.0, 1.0)], 1.0);
        let v = harmonic_potential(&grid, 2.0, 1.0).unwrap();
        assert_eq!(v.values()[index_of(&grid, 1.0, 0.0)], 2.0);
        let oned = Arc::new(SpectralGrid::centered(1, 16.0, 16).unwrap());
        assert!(harmonic_potential(&oned, 1.0, 1.0).is_err());
    }

    #[test]
    fn rotation_annihilates_radial_fields() {
        let grid = grid2(16.0, 64);
        let radial = ComplexField::from_fn(&grid, |p| {
            Complex64::new((-(p[0] * p[0] + p[1] * p[1])).exp(), 0.0)
        });
        let out = apply_rotation(&radial).unwrap();
        let scale = radial.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(out.values().iter().all(|z| z.norm() < 1e-10 * scale));

        let constant = ComplexField::from_fn(&grid, |_| Complex64::new(1.0, 2.0));
        let out = apply_rotation(&constant).unwrap();
        assert!(out.values().iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn unit_vortex_is_an_eigenfunction() {
        let grid = grid2(20.0, 128);
        let vortex = ComplexField::from_fn(&grid, |p| {
            let r2 = p[0] * p[0] + p[1] * p[1];
            Complex64::new(p[0], p[1]) * (-r2 / 2.0).exp()
        });
        let out = apply_rotation(&vortex).unwrap();
        let err = out
            .values()
            .iter()
            .zip(vortex.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "max deviation {err}");
    }

    #[test]
    fn rotation_is_one_dimensional_error() {
        let grid = Arc::new(SpectralGrid::centered(1, 4.0, 16).unwrap());
        assert!(matches!(
            apply_rotation(&ComplexField::zeros(&grid)),
            Err(Error::Requires2d(_))
        ));
    }

    // Independent route: Coulomb convolution, then the two differential
    // operators applied one at a time with spectral derivatives.
    fn composed_psi(rho: &RealField, n: [f64; 3]) -> Vec<f64> {
        let grid = rho.grid();
        let coulomb = KernelSymbol::coulomb_2d(grid).unwrap();
        let pot = coulomb.convolve(rho).unwrap().to_complex();
        let directional = |f: &ComplexField| {
            let a = apply_gradient(f, 0).unwrap();
            let b = apply_gradient(f, 1).unwrap();
            let values = a
                .values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| x * n[0] + y * n[1])
                .collect();
            ComplexField::from_values(grid, values, Space::Physical).unwrap()
        };
        let dnn = directional(&directional(&pot));
        let lap = apply_laplacian(&pot).unwrap();
        dnn.values()
            .iter()
            .zip(lap.values())
            .map(|(a, l)| (-1.5 * (a - l * (n[2] * n[2]))).re)
            .collect()
    }

    #[test]
    fn dipolar_symbol_matches_composed_operators() {
        let grid = grid2(16.0, 64);
        let rho = RealField::from_fn(&grid, |p| {
            (-((p[0] - 0.7).powi(2) + 2.0 * (p[1] + 0.3).powi(2))).exp()
        });
        let third = std::f64::consts::FRAC_PI_3;
        for n in [
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [third.cos(), third.sin(), 0.0],
            [0.6, 0.0, 0.8],
        ] {
            let fused = dipolar_psi(&rho, n).unwrap();
            let composed = composed_psi(&rho, n);
            let scale = composed.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for (a, b) in fused.values().iter().zip(&composed) {
                assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn dipolar_symbol_along_normal_axis() {
        let grid = grid2(16.0, 32);
        let s = dipolar_symbol(&grid, [0.0, 0.0, 1.0]).unwrap();
        for (v, k2) in s.symbol().iter().zip(grid.wavenumber_sq()) {
            assert_relative_eq!(*v, -1.5 * k2.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn dipolar_single_mode() {
        let grid = grid2(2.0 * std::f64::consts::PI, 32);
        let (k1, k2) = (3.0, 4.0);
        let rho = RealField::from_fn(&grid, |p| (k1 * p[0] + k2 * p[1]).cos());
        let psi = dipolar_psi(&rho, [1.0, 0.0, 0.0]).unwrap();
        let factor = 1.5 * k1 * k1 / (k1 * k1 + k2 * k2).sqrt();
        for (p, r) in psi.values().iter().zip(rho.values()) {
            assert!((p - factor * r).abs() < 1e-12);
        }
    }

    #[test]
    fn dipolar_constant_density_and_reality() {
        let grid = grid2(16.0, 32);
        let c = RealField::from_fn(&grid, |_| 0.8);
        let psi = dipolar_psi(&c, [0.6, 0.0, 0.8]).unwrap();
        assert!(psi.values().iter().all(|v| v.abs() < 1e-13));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let values = (0..grid.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let rho = RealField::from_values(&grid, values).unwrap();
        let symbol = dipolar_symbol(&grid, [0.6, 0.0, 0.8]).unwrap();
        let mut buf: Vec<Complex64> = rho.values().iter().map(|&v| v.into()).collect();
        symbol.convolve_in_place(&mut buf);
        let norm: f64 = buf.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let imag: f64 = buf.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
        assert!(imag < 1e-12 * norm);
        let mean: f64 = buf.iter().map(|z| z.re).sum::<f64>() / buf.len() as f64;
        assert!(mean.abs() < 1e-12 * norm);
    }

    #[test]
    fn rotation_is_hermitian() {
        let grid = grid2(12.0, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let centers: Vec<(f64, f64, f64, f64)> = (0..4)
            .map(|_| {
                (
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect();
        let phi = ComplexField::from_fn(&grid, |p| {
            centers
                .iter()
                .map(|&(a, b, re, im)| {
                    Complex64::new(re, im) * (-((p[0] - a).powi(2) + (p[1] - b).powi(2))).exp()
                })
                .sum()
        });
        let lphi = apply_rotation(&phi).unwrap();
        let inner: Complex64 = phi
            .values()
            .iter()
            .zip(lphi.values())
            .map(|(u, l)| u.conj() * l)
            .sum::<Complex64>()
            * grid.cell_volume();
        // (x1 d2 - x2 d1) is skew, so <phi, L phi> is real
        assert!(inner.im.abs() < 1e-10, "{inner}");
    }

    #[test]
    fn power_density() {
        let grid = Arc::new(SpectralGrid::centered(1, 4.0, 16).unwrap());
        let unit = ComplexField::from_fn(&grid, |p| Complex64::from_polar(1.0, p[0]));
        assert!(nonlinear_density(&unit, 3)
            .values()
            .iter()
            .all(|v| (v - 1.0).abs() < 1e-14));
        assert!(nonlinear_density(&ComplexField::zeros(&grid), 2)
            .values()
            .iter()
            .all(|&v| v == 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<Complex64> = (0..16)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let phi = ComplexField::from_values(&grid, values, Space::Physical).unwrap();
        let rho = nonlinear_density(&phi, 2);
        for (z, r) in phi.values().iter().zip(rho.values()) {
            let oracle = (z.re * z.re + z.im * z.im).powi(2);
            assert_relative_eq!(*r, oracle, max_relative = 1e-14);
        }
    }

    #[test]
    fn cubic_quintic_matches_alpha_form() {
        let grid = Arc::new(SpectralGrid::centered(1, 40.0, 256).unwrap());
        let kernel = Arc::new(KernelSymbol::box_kernel(&grid, 2.5).unwrap());
        let (alpha1, alpha2) = (-1.0, -0.5);
        let model = ModelSpec::cubic_quintic(alpha1, alpha2, Some(kernel.clone())).unwrap();
        assert_eq!(model.sigma(), 2);
        let phi = ComplexField::from_fn(&grid, |p| {
            Complex64::new((p[0] / 2.0).tanh(), 0.3 * (-p[0] * p[0]).exp())
        });
        let h_phi = model.apply_hamiltonian(&phi).unwrap();

        // i d/dt phi = -(1/2 Delta + alpha1 U * |phi|^2 + alpha2 |phi|^4) phi
        let lap = apply_laplacian(&phi).unwrap();
        let rho = phi.modulus_sq();
        let conv = kernel.convolve(&rho).unwrap();
        for i in 0..grid.len() {
            let r = rho.values()[i];
            let expected = -(lap.values()[i] * 0.5
                + phi.values()[i] * (alpha1 * conv.values()[i] + alpha2 * r * r));
            assert!((h_phi.values()[i] - expected).norm() < 1e-12);
        }
        assert!(ModelSpec::cubic_quintic(1.0, 0.0, None).is_err());
    }

    #[test]
    fn invalid_models() {
        assert!(ModelSpec::new(1.0, 0).is_err());
        let grid = grid2(8.0, 16);
        let kernel = Arc::new(KernelSymbol::gaussian(&grid, 1.0).unwrap());
        assert!(ModelSpec::new(1.0, 1).unwrap().with_nonlocal(0.0, kernel).is_err());
        assert!(ModelSpec::new(1.0, 1)
            .unwrap()
            .with_dipolar(1.0, &grid, [1.0, 1.0, 0.0])
            .is_err());
        let oned = Arc::new(SpectralGrid::centered(1, 8.0, 16).unwrap());
        let rotating = ModelSpec::new(1.0, 1).unwrap().with_rotation(0.5);
        assert!(rotating.validate_for(&oned).is_err());
        assert!(rotating.validate_for(&grid).is_ok());
    }
}
