//! Pseudo-spectral solvers for nonlinear Schrödinger / Gross-Pitaevskii
//! equations on periodic boxes.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectral`]: grids, Fourier transforms, spectral derivatives and
//!   Fourier-symbol convolutions.
//! - [`model`]: the right-hand side (potential, power nonlinearity, nonlocal
//!   interaction, rotation, dipolar potential).
//! - [`integrators`]: Crank-Nicolson, classical relaxation and generalized
//!   relaxation time steppers together with their linear solvers.
//! - [`observables`]: discrete mass and energies, energy-error bookkeeping.

pub mod error;
pub mod integrators;
pub mod model;
pub mod observables;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
