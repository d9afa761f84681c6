//! Time integrators: Crank-Nicolson, classical relaxation and generalized
//! relaxation, together with the building blocks they share.
//!
//! Every scheme reduces one step to the semi-implicit problem
//!
//! ```text
//! (I - i dt/4 Delta + i dt/2 W - i dt/2 Omega L) u = phi_n,   phi_{n+1} = 2 u - phi_n
//! ```
//!
//! for a real potential `W`. Crank-Nicolson wraps it in an outer fixed point
//! over the nonlinear quotient; the relaxation schemes compute `W` explicitly
//! from staggered auxiliary densities.

mod auxiliary;
mod crank_nicolson;
mod driver;
mod linear;
mod relaxation;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{ComplexField, RealField, SpectralGrid};

pub use auxiliary::{gamma_residual, gamma_solve, upsilon_update, GammaSolution};
pub use crank_nicolson::cn_step;
pub use driver::{Integrator, Scheme};
pub use linear::semi_implicit_solve;
pub use relaxation::{generalized_relaxation_step, init_auxiliary, relaxation_step, AuxInit};

/// Linear solver used for the semi-implicit problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolver {
    /// Picard iteration with the Laplacian inverted exactly in Fourier space.
    #[default]
    FourierFixedPoint,
    /// Restarted GMRES preconditioned by the free-particle operator.
    PreconditionedKrylov,
}

/// Time step and iteration controls. Tolerances are relative to the norm of
/// the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub fp_tol: f64,
    pub fp_max_iter: usize,
    pub krylov_tol: f64,
    pub krylov_max_iter: usize,
    pub linear_solver: LinearSolver,
}

impl SolverConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            fp_tol: 1e-12,
            fp_max_iter: 100,
            krylov_tol: 1e-12,
            krylov_max_iter: 200,
            linear_solver: LinearSolver::FourierFixedPoint,
        }
    }

    pub fn with_linear_solver(mut self, solver: LinearSolver) -> Self {
        self.linear_solver = solver;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt != 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be finite and nonzero, got {}", self.dt)));
        }
        if !(self.fp_tol > 0.0 && self.krylov_tol > 0.0) {
            return Err(Error::InvalidConfig("solver tolerances must be positive".into()));
        }
        if self.fp_max_iter == 0 || self.krylov_max_iter == 0 {
            return Err(Error::InvalidConfig("iteration limits must be at least 1".into()));
        }
        Ok(())
    }
}

/// Iteration counts and final residual of one step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepReport {
    /// Inner fixed-point iterations summed over the step.
    pub fp_iterations: usize,
    /// Krylov operator applications summed over the step.
    pub krylov_iterations: usize,
    /// Outer Crank-Nicolson iterations (zero for relaxation schemes).
    pub outer_iterations: usize,
    /// Largest per-point iteration count of the local gamma solve.
    pub gamma_iterations: usize,
    /// Points where the gamma equation had no nonnegative root and gamma
    /// kept its previous value.
    pub gamma_clamps: usize,
    /// Relative residual of the last linear solve.
    pub residual: f64,
}

/// `(phi_n, gamma_{n-1/2}, upsilon_{n-1/2})` at step `n`.
#[derive(Debug, Clone)]
pub struct RelaxState {
    pub phi: ComplexField,
    pub gamma_prev: RealField,
    pub upsilon_prev: RealField,
    pub step_index: u64,
    pub dt: f64,
}

impl RelaxState {
    pub fn new(phi: ComplexField, gamma_prev: RealField, upsilon_prev: RealField, dt: f64) -> Result<Self> {
        gamma_prev.expect_grid(phi.grid())?;
        upsilon_prev.expect_grid(phi.grid())?;
        Ok(Self {
            phi,
            gamma_prev,
            upsilon_prev,
            step_index: 0,
            dt,
        })
    }

    /// `t_n = n dt`.
    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.dt
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.phi.grid()
    }
}

pub(crate) fn l2_norm(values: &[num_complex::Complex64]) -> f64 {
    values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn l2_distance(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}
