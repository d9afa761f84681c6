//! Discrete mass, energies and energy-error series.
//!
//! All integrals use rectangle-rule weights `dx^d` and all gradients are
//! spectral, so `energy_rlx(phi, |phi|^2, |phi|^2) == energy_cn(phi)` holds at
//! the level of the implemented formulas.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrators::StepReport;
use crate::model::{rotation_from_spectrum, ModelSpec};
use crate::spectral::{gradient_norm_sq, ComplexField, RealField, Space};

/// `dx^d sum_j |phi_j|^2`.
pub fn mass(phi: &ComplexField) -> f64 {
    phi.grid().cell_volume() * phi.values().iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Discrete energy of the continuous functional:
///
/// ```text
/// 1/4 |grad phi|^2 + 1/2 M(V rho) + beta/(2 sigma + 2) M(rho^(sigma+1))
///   + lambda/4 M((U * rho) rho) - Omega/2 M(Re conj(phi) L phi)
/// ```
///
/// with `rho = |phi|^2`. This is the quantity Crank-Nicolson conserves.
pub fn energy_cn(phi: &ComplexField, model: &ModelSpec) -> Result<f64> {
    phi.expect_space(Space::Physical)?;
    model.validate_for(phi.grid())?;
    let dv = phi.grid().cell_volume();
    let sigma = model.sigma() as i32;
    let density: Vec<f64> = phi.values().iter().map(|z| z.norm_sqr()).collect();
    let local: f64 = density.iter().map(|r| r.powi(sigma + 1)).sum::<f64>() * dv;
    let mut energy = linear_part(phi, model, &density)? + model.beta() / (2.0 * (sigma as f64 + 1.0)) * local;
    if let Some(conv) = model.nonlocal_potential(&density) {
        // conv already carries lambda
        energy += 0.25 * dv * conv.iter().zip(&density).map(|(c, r)| c * r).sum::<f64>();
    }
    Ok(energy)
}

/// Relaxation energy with auxiliary densities `gamma` (local term) and
/// `upsilon` (nonlocal term):
///
/// ```text
/// 1/4 |grad phi|^2 + 1/2 M(V rho) + beta/2 M(gamma^sigma (rho - sigma/(sigma+1) gamma))
///   + lambda/2 M((U * upsilon)(rho - upsilon/2)) - Omega/2 M(Re conj(phi) L phi)
/// ```
pub fn energy_rlx(phi: &ComplexField, gamma: &RealField, upsilon: &RealField, model: &ModelSpec) -> Result<f64> {
    phi.expect_space(Space::Physical)?;
    gamma.expect_grid(phi.grid())?;
    upsilon.expect_grid(phi.grid())?;
    model.validate_for(phi.grid())?;
    let dv = phi.grid().cell_volume();
    let sigma = model.sigma() as i32;
    let ratio = sigma as f64 / (sigma as f64 + 1.0);
    let density: Vec<f64> = phi.values().iter().map(|z| z.norm_sqr()).collect();
    let local: f64 = gamma
        .values()
        .iter()
        .zip(&density)
        .map(|(g, r)| g.powi(sigma) * (r - ratio * g))
        .sum::<f64>()
        * dv;
    let mut energy = linear_part(phi, model, &density)? + 0.5 * model.beta() * local;
    if let Some(conv) = model.nonlocal_potential(upsilon.values()) {
        energy += 0.5
            * dv
            * conv
                .iter()
                .zip(&density)
                .zip(upsilon.values())
                .map(|((c, r), u)| c * (r - 0.5 * u))
                .sum::<f64>();
    }
    Ok(energy)
}

// Kinetic, trap and rotation terms shared by both energies.
fn linear_part(phi: &ComplexField, model: &ModelSpec, density: &[f64]) -> Result<f64> {
    let dv = phi.grid().cell_volume();
    let mut energy = 0.25 * gradient_norm_sq(phi)?;
    if let Some(v) = model.potential() {
        energy += 0.5 * dv * v.values().iter().zip(density).map(|(v, r)| v * r).sum::<f64>();
    }
    if model.omega() != 0.0 {
        let grid = phi.grid();
        let mut spec = phi.values().to_vec();
        grid.forward_in_place(&mut spec);
        let rot = rotation_from_spectrum(grid, &spec);
        let inner: f64 = phi
            .values()
            .iter()
            .zip(&rot)
            .map(|(u, l)| (u.conj() * l).re)
            .sum();
        energy -= 0.5 * model.omega() * dv * inner;
    }
    Ok(energy)
}

/// Observables after one step.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: u64,
    pub time: f64,
    pub mass: f64,
    pub energy_scheme: f64,
    pub energy_reference: f64,
    /// `|E - E_ref| / |E_ref|`, or the absolute difference when `E_ref = 0`.
    pub rel_energy_error: f64,
    pub report: StepReport,
}

impl DiagnosticsRecord {
    pub fn new(step: u64, time: f64, mass: f64, energy: f64, reference: f64, report: StepReport) -> Self {
        Self {
            step,
            time,
            mass,
            energy_scheme: energy,
            energy_reference: reference,
            rel_energy_error: energy_error(energy, reference),
            report,
        }
    }
}

fn energy_error(energy: f64, reference: f64) -> f64 {
    let diff = (energy - reference).abs();
    if reference == 0.0 {
        diff
    } else {
        diff / reference.abs()
    }
}

/// Energy drift over a run.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyDrift {
    /// `sup_n` of the per-step errors.
    pub max: f64,
    /// Per-step errors against the first record's reference energy.
    pub series: Vec<f64>,
    /// Set when the reference energy is zero and errors are absolute.
    pub absolute: bool,
}

/// Relative energy error of every record against the reference energy of the
/// first record, and its supremum.
pub fn relative_energy_error_series(records: &[DiagnosticsRecord]) -> Result<EnergyDrift> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidConfig("energy error of an empty record series".into()))?;
    let reference = first.energy_reference;
    let series: Vec<f64> = records
        .iter()
        .map(|r| energy_error(r.energy_scheme, reference))
        .collect();
    Ok(EnergyDrift {
        max: series.iter().copied().fold(0.0, f64::max),
        series,
        absolute: reference == 0.0,
    })
}

/// `dx^d sum_j Re(conj(phi_j) (L phi)_j)`, the angular momentum expectation.
pub fn angular_momentum(phi: &ComplexField) -> Result<f64> {
    let rot = crate::model::apply_rotation(phi)?;
    let inner: Complex64 = phi
        .values()
        .iter()
        .zip(rot.values())
        .map(|(u, l)| u.conj() * l)
        .sum();
    Ok(phi.grid().cell_volume() * inner.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{KernelSymbol, SpectralGrid};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn mass_of_constants_and_gaussians() {
        let grid = Arc::new(SpectralGrid::centered(1, 60.0, 256).unwrap());
        let one = ComplexField::from_fn(&grid, |_| Complex64::new(1.0, 0.0));
        assert_relative_eq!(mass(&one), 60.0, max_relative = 1e-14);
        assert_eq!(mass(&ComplexField::zeros(&grid)), 0.0);

        // |exp(-x^2)|^2 integrates to sqrt(pi/2)
        let fine = Arc::new(SpectralGrid::centered(1, 60.0, 8192).unwrap());
        let g = ComplexField::from_fn(&fine, |p| Complex64::new((-p[0] * p[0]).exp(), 0.0));
        assert!((mass(&g) - (PI / 2.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn plane_wave_kinetic_energy() {
        let grid = Arc::new(SpectralGrid::centered(1, 2.0 * PI, 32).unwrap());
        let model = ModelSpec::new(0.0, 1).unwrap();
        let k = 3.0;
        let wave = ComplexField::from_fn(&grid, |p| Complex64::from_polar(1.0, k * p[0]));
        let e = energy_cn(&wave, &model).unwrap();
        assert_relative_eq!(e, k * k / 4.0 * 2.0 * PI, max_relative = 1e-13);
        assert_eq!(energy_cn(&ComplexField::zeros(&grid), &model).unwrap(), 0.0);
    }

    #[test]
    fn relaxation_energy_of_zero_state() {
        let grid = Arc::new(SpectralGrid::centered(1, 10.0, 16).unwrap());
        let kernel = Arc::new(KernelSymbol::gaussian(&grid, 1.0).unwrap());
        let model = ModelSpec::cubic_quintic(1.0, -0.5, Some(kernel)).unwrap();
        let z = RealField::zeros(&grid);
        let e = energy_rlx(&ComplexField::zeros(&grid), &z, &z, &model).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn quintic_constant_state() {
        let grid = Arc::new(SpectralGrid::centered(1, 10.0, 16).unwrap());
        let (beta, c) = (-1.3, 0.8_f64);
        let model = ModelSpec::new(beta, 2).unwrap();
        let phi = ComplexField::from_fn(&grid, |_| Complex64::new(c.sqrt(), 0.0));
        let gamma = RealField::from_fn(&grid, |_| c);
        let e = energy_rlx(&phi, &gamma, &gamma, &model).unwrap();
        assert_relative_eq!(e, beta / 6.0 * c.powi(3) * 10.0, max_relative = 1e-14);
        assert_relative_eq!(e, energy_cn(&phi, &model).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn error_series_flags_zero_reference() {
        let report = StepReport::default();
        let records = vec![
            DiagnosticsRecord::new(0, 0.0, 1.0, 0.0, 0.0, report),
            DiagnosticsRecord::new(1, 0.1, 1.0, 1e-9, 0.0, report),
        ];
        let drift = relative_energy_error_series(&records).unwrap();
        assert!(drift.absolute);
        assert_eq!(drift.max, 1e-9);

        let records = vec![
            DiagnosticsRecord::new(0, 0.0, 1.0, -2.0, -2.0, report),
            DiagnosticsRecord::new(1, 0.1, 1.0, -2.0, -2.0, report),
        ];
        let drift = relative_energy_error_series(&records).unwrap();
        assert_eq!(drift.max, 0.0);
        assert!(!drift.absolute);
        assert!(relative_energy_error_series(&[]).is_err());
    }
}
