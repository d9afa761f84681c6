//! Crank-Nicolson with the polynomial nonlinear quotient
//! `beta/(s+1) sum_{k=0}^{s} |phi_{n+1}|^(2k) |phi_n|^(2(s-k))`, which is the
//! nonsingular form of `beta (F(|phi_{n+1}|^2) - F(|phi_n|^2)) / (|phi_{n+1}|^2 - |phi_n|^2)`.

use num_complex::Complex64;

use super::linear::HalfStepOperator;
use super::{l2_distance, l2_norm, SolverConfig, StepReport};
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::spectral::{ComplexField, Space};

/// One Crank-Nicolson step. The implicit nonlinearity is resolved by an outer
/// fixed point, each pass solving the semi-implicit linear problem with the
/// quotient and averaged convolution frozen.
pub fn cn_step(phi_n: &ComplexField, model: &ModelSpec, config: &SolverConfig) -> Result<(ComplexField, StepReport)> {
    phi_n.expect_space(Space::Physical)?;
    config.validate()?;
    let grid = phi_n.grid();
    model.validate_for(grid)?;

    let sigma = model.sigma();
    let current = phi_n.values();
    let density_n: Vec<f64> = current.iter().map(|z| z.norm_sqr()).collect();
    let target = config.fp_tol * l2_norm(current);
    let mut report = StepReport::default();
    let mut next = current.to_vec();
    let mut midpoint = current.to_vec();

    for outer in 1..=config.fp_max_iter {
        let density_next: Vec<f64> = next.iter().map(|z| z.norm_sqr()).collect();
        let potential = frozen_potential(model, sigma, &density_n, &density_next);
        let op = HalfStepOperator::new(grid, &potential, model.omega(), config.dt);
        midpoint = op.solve(current, &midpoint, config, &mut report)?;
        let updated: Vec<Complex64> = midpoint
            .iter()
            .zip(current)
            .map(|(u, c)| 2.0 * u - c)
            .collect();
        let change = l2_distance(&updated, &next);
        next = updated;
        if change <= target {
            report.outer_iterations = outer;
            return Ok((ComplexField::from_values(grid, next, Space::Physical)?, report));
        }
    }
    Err(Error::NoConvergence {
        solver: "crank-nicolson outer fixed point",
        iterations: config.fp_max_iter,
        residual: report.residual,
    })
}

fn frozen_potential(model: &ModelSpec, sigma: u32, density_n: &[f64], density_next: &[f64]) -> Vec<f64> {
    let weight = model.beta() / (sigma as f64 + 1.0);
    let mut w: Vec<f64> = density_n
        .iter()
        .zip(density_next)
        .map(|(&a, &b)| {
            let mut sum = 0.0;
            let mut bk = 1.0;
            for k in 0..=sigma {
                sum += bk * a.powi((sigma - k) as i32);
                bk *= b;
            }
            weight * sum
        })
        .collect();
    if let Some(v) = model.potential() {
        for (wi, vi) in w.iter_mut().zip(v.values()) {
            *wi += vi;
        }
    }
    if model.kernel().is_some() {
        let average: Vec<f64> = density_n
            .iter()
            .zip(density_next)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        if let Some(conv) = model.nonlocal_potential(&average) {
            for (wi, ci) in w.iter_mut().zip(conv) {
                *wi += ci;
            }
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::energy_cn;
    use crate::spectral::SpectralGrid;
    use std::sync::Arc;

    #[test]
    fn linear_plane_wave_amplification() {
        let grid = Arc::new(SpectralGrid::centered(1, 2.0 * std::f64::consts::PI, 32).unwrap());
        let model = ModelSpec::new(0.0, 1).unwrap();
        let (k, dt) = (5.0, 0.1);
        let wave = ComplexField::from_fn(&grid, |p| Complex64::from_polar(1.0, k * p[0]));
        let (next, _) = cn_step(&wave, &model, &SolverConfig::new(dt)).unwrap();
        let factor = Complex64::new(1.0, -dt * k * k / 4.0) / Complex64::new(1.0, dt * k * k / 4.0);
        assert!((factor.norm() - 1.0).abs() < 1e-15);
        for (a, b) in next.values().iter().zip(wave.values()) {
            assert!((a - factor * b).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_cubic_state() {
        let grid = Arc::new(SpectralGrid::centered(1, 4.0, 16).unwrap());
        let (beta, dt) = (1.7, 0.2);
        let c = Complex64::new(0.6, 0.9);
        let model = ModelSpec::new(beta, 1).unwrap();
        let phi = ComplexField::from_fn(&grid, |_| c);
        let (next, report) = cn_step(&phi, &model, &SolverConfig::new(dt)).unwrap();
        let a = beta * c.norm_sqr() * dt / 2.0;
        let expected = c * Complex64::new(1.0, -a) / Complex64::new(1.0, a);
        assert!(next.values().iter().all(|z| (z - expected).norm() < 1e-12));
        assert!(report.outer_iterations >= 1);
    }

    #[test]
    fn one_step_conserves_energy() {
        let grid = Arc::new(SpectralGrid::centered(1, 30.0, 256).unwrap());
        let model = ModelSpec::new(-1.0, 2).unwrap();
        let phi = ComplexField::from_fn(&grid, |p| {
            Complex64::from_polar((-p[0] * p[0]).exp() * 1.2, 0.4 * p[0])
        });
        let (next, _) = cn_step(&phi, &model, &SolverConfig::new(0.02)).unwrap();
        let e0 = energy_cn(&phi, &model).unwrap();
        let e1 = energy_cn(&next, &model).unwrap();
        assert!(((e1 - e0) / e0).abs() < 1e-12, "{e0} {e1}");
    }
}
