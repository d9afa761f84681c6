//! Relaxation schemes: the staggered auxiliary densities make every step
//! linearly implicit.

use num_complex::Complex64;

use super::auxiliary::solve_values;
use super::crank_nicolson::cn_step;
use super::linear::HalfStepOperator;
use super::{RelaxState, SolverConfig, StepReport};
use crate::error::Result;
use crate::model::ModelSpec;
use crate::spectral::{ComplexField, RealField, Space};

/// How `gamma_{-1/2}` and `Upsilon_{-1/2}` are obtained.
#[derive(Debug, Clone)]
pub enum AuxInit {
    /// `phi(-dt/2)` is known; both auxiliaries are set to its modulus squared.
    ExactProvided(ComplexField),
    /// One Crank-Nicolson step of size `-dt/2` from `phi_0`.
    ReverseCnHalfStep,
}

/// Returns `(gamma_{-1/2}, Upsilon_{-1/2})`.
pub fn init_auxiliary(
    phi0: &ComplexField,
    model: &ModelSpec,
    config: &SolverConfig,
    mode: &AuxInit,
) -> Result<(RealField, RealField)> {
    let density = match mode {
        AuxInit::ExactProvided(phi_half) => {
            phi_half.expect_grid(phi0.grid())?;
            phi_half.modulus_sq()
        }
        AuxInit::ReverseCnHalfStep => {
            let mut reverse = config.clone();
            reverse.dt = -config.dt / 2.0;
            let (phi_half, _) = cn_step(phi0, model, &reverse)?;
            phi_half.modulus_sq()
        }
    };
    Ok((density.clone(), density))
}

/// Classical relaxation: `Upsilon_{n+1/2} = 2 |phi_n|^2 - Upsilon_{n-1/2}`
/// drives both the local term `beta Upsilon^sigma` and the convolution.
/// For `sigma = 1` this is the energy-preserving scheme; for larger `sigma`
/// it is the naive extension, which is second order but does not conserve
/// energy. `gamma` in the returned state mirrors `Upsilon`.
pub fn relaxation_step(state: &RelaxState, model: &ModelSpec, config: &SolverConfig) -> Result<(RelaxState, StepReport)> {
    let density = density_of(&state.phi);
    let upsilon: Vec<f64> = density
        .iter()
        .zip(state.upsilon_prev.values())
        .map(|(r, u)| 2.0 * r - u)
        .collect();
    let report = StepReport::default();
    advance(state, model, config, upsilon.clone(), upsilon, report)
}

/// Generalized relaxation: `gamma_{n+1/2}` from the local polynomial solve,
/// `Upsilon_{n+1/2}` from the explicit update, then the linear half step
/// with `W = V + beta gamma^sigma + lambda U * Upsilon`.
pub fn generalized_relaxation_step(
    state: &RelaxState,
    model: &ModelSpec,
    config: &SolverConfig,
) -> Result<(RelaxState, StepReport)> {
    let density = density_of(&state.phi);
    let (gamma, iterations, clamps) = solve_values(&density, state.gamma_prev.values(), model.sigma())?;
    let upsilon: Vec<f64> = density
        .iter()
        .zip(state.upsilon_prev.values())
        .map(|(r, u)| 2.0 * r - u)
        .collect();
    let report = StepReport {
        gamma_iterations: iterations,
        gamma_clamps: clamps,
        ..StepReport::default()
    };
    advance(state, model, config, gamma, upsilon, report)
}

fn density_of(phi: &ComplexField) -> Vec<f64> {
    phi.values().iter().map(|z| z.norm_sqr()).collect()
}

fn advance(
    state: &RelaxState,
    model: &ModelSpec,
    config: &SolverConfig,
    gamma: Vec<f64>,
    upsilon: Vec<f64>,
    mut report: StepReport,
) -> Result<(RelaxState, StepReport)> {
    state.phi.expect_space(Space::Physical)?;
    config.validate()?;
    let grid = state.grid();
    model.validate_for(grid)?;
    state.gamma_prev.expect_grid(grid)?;
    state.upsilon_prev.expect_grid(grid)?;

    let sigma = model.sigma() as i32;
    let mut potential: Vec<f64> = gamma.iter().map(|g| model.beta() * g.powi(sigma)).collect();
    if let Some(v) = model.potential() {
        for (w, vi) in potential.iter_mut().zip(v.values()) {
            *w += vi;
        }
    }
    if let Some(conv) = model.nonlocal_potential(&upsilon) {
        for (w, c) in potential.iter_mut().zip(conv) {
            *w += c;
        }
    }
    let op = HalfStepOperator::new(grid, &potential, model.omega(), config.dt);
    let current = state.phi.values();
    let midpoint = op.solve(current, current, config, &mut report)?;
    let next: Vec<Complex64> = midpoint
        .iter()
        .zip(current)
        .map(|(u, c)| 2.0 * u - c)
        .collect();
    let advanced = RelaxState {
        phi: ComplexField::from_values(grid, next, Space::Physical)?,
        gamma_prev: RealField::from_values(grid, gamma)?,
        upsilon_prev: RealField::from_values(grid, upsilon)?,
        step_index: state.step_index + 1,
        dt: state.dt,
    };
    Ok((advanced, report))
}
