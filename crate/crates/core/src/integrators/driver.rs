//! A trajectory advanced by one of the three schemes, with the energy that
//! scheme is measured against.

use std::fmt;
use std::str::FromStr;

use super::{cn_step, generalized_relaxation_step, init_auxiliary, relaxation_step};
use super::{AuxInit, RelaxState, SolverConfig, StepReport};
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::observables::{energy_cn, energy_rlx, mass};
use crate::spectral::ComplexField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    CrankNicolson,
    /// Classical relaxation. Its scheme energy is the relaxation energy for
    /// `sigma = 1` and the plain discrete energy otherwise, since the naive
    /// extension conserves no relaxation functional.
    Relaxation,
    GeneralizedRelaxation,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [
        Scheme::CrankNicolson,
        Scheme::Relaxation,
        Scheme::GeneralizedRelaxation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::CrankNicolson => "crank-nicolson",
            Scheme::Relaxation => "relaxation",
            Scheme::GeneralizedRelaxation => "generalized-relaxation",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scheme '{s}'")))
    }
}

/// Owns one trajectory.
#[derive(Debug, Clone)]
pub struct Integrator {
    scheme: Scheme,
    model: ModelSpec,
    config: SolverConfig,
    state: RelaxState,
}

impl Integrator {
    /// Sets up step 0. Crank-Nicolson ignores `init`; for it the auxiliary
    /// fields simply hold `|phi_0|^2`.
    pub fn new(scheme: Scheme, model: ModelSpec, config: SolverConfig, phi0: ComplexField, init: &AuxInit) -> Result<Self> {
        config.validate()?;
        if config.dt <= 0.0 {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", config.dt)));
        }
        model.validate_for(phi0.grid())?;
        let (gamma, upsilon) = match scheme {
            Scheme::CrankNicolson => {
                let rho = phi0.modulus_sq();
                (rho.clone(), rho)
            }
            _ => init_auxiliary(&phi0, &model, &config, init)?,
        };
        let state = RelaxState::new(phi0, gamma, upsilon, config.dt)?;
        Ok(Self {
            scheme,
            model,
            config,
            state,
        })
    }

    pub fn step(&mut self) -> Result<StepReport> {
        let (next, report) = match self.scheme {
            Scheme::CrankNicolson => {
                let (phi, report) = cn_step(&self.state.phi, &self.model, &self.config)?;
                let rho = phi.modulus_sq();
                let next = RelaxState {
                    phi,
                    gamma_prev: rho.clone(),
                    upsilon_prev: rho,
                    step_index: self.state.step_index + 1,
                    dt: self.state.dt,
                };
                (next, report)
            }
            Scheme::Relaxation => relaxation_step(&self.state, &self.model, &self.config)?,
            Scheme::GeneralizedRelaxation => generalized_relaxation_step(&self.state, &self.model, &self.config)?,
        };
        self.state = next;
        Ok(report)
    }

    /// Energy the scheme is judged by, evaluated on
    /// `(phi_n, gamma_{n-1/2}, Upsilon_{n-1/2})`.
    pub fn scheme_energy(&self) -> Result<f64> {
        let s = &self.state;
        match self.scheme {
            Scheme::CrankNicolson => energy_cn(&s.phi, &self.model),
            Scheme::Relaxation if self.model.sigma() > 1 => energy_cn(&s.phi, &self.model),
            _ => energy_rlx(&s.phi, &s.gamma_prev, &s.upsilon_prev, &self.model),
        }
    }

    pub fn mass(&self) -> f64 {
        mass(&self.state.phi)
    }

    pub fn state(&self) -> &RelaxState {
        &self.state
    }

    pub fn phi(&self) -> &ComplexField {
        &self.state.phi
    }

    pub fn time(&self) -> f64 {
        self.state.time()
    }

    pub fn step_index(&self) -> u64 {
        self.state.step_index
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names_round_trip() {
        for scheme in Scheme::ALL {
            assert_eq!(scheme.name().parse::<Scheme>().unwrap(), scheme);
        }
        assert!("leapfrog".parse::<Scheme>().is_err());
    }
}
