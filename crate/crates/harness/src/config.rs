//! Experiment configuration files (TOML).
//!
//! ```toml
//! [grid]
//! bounds = [[-30.0, 30.0]]
//! modes = 8192
//!
//! [model]
//! beta = -1.0
//! sigma = 2
//!
//! [scheme]
//! name = "generalized-relaxation"
//! dt = 0.001
//! t_final = 0.5
//!
//! [init]
//! kind = "gaussian"
//! ```
//!
//! `[solver]` and `[output]` are optional. Unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nlsrelax_core::integrators::{LinearSolver, Scheme, SolverConfig};
use nlsrelax_core::model::ModelSpec;
use nlsrelax_core::spectral::{KernelSymbol, SpectralGrid};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub grid: GridConfig,
    pub model: ModelConfig,
    pub scheme: SchemeConfig,
    pub init: InitConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// `[lower, upper]` per axis.
    pub bounds: Vec<[f64; 2]>,
    /// Nodes per axis; signed so that negative input is reported, not wrapped.
    pub modes: i64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Cubic-quintic parameters; exclusive with `beta`, `sigma`, `lambda`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(default)]
    pub omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipole_axis: Option<[f64; 3]>,
    /// Harmonic trap frequencies `[gx1, gx2]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelConfig {
    Box { width: f64 },
    Gaussian { width: f64 },
    Coulomb2d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub name: String,
    pub dt: f64,
    pub t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitConfig {
    /// `amplitude exp(-|x - center|^2 / width^2)`.
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// `tanh(D (x - x0)) tanh(D (x + x0))`; `D` is found from the kernel
    /// width and `alpha2` unless given.
    TanhPair {
        #[serde(default = "one")]
        x0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<f64>,
    },
    /// `amplitude r^m exp(-r^2/2) exp(i m theta)`.
    Vortex { amplitude: f64, charge: i64 },
    /// The vortex profile rescaled to a given mass.
    GaussianVortex {
        charge: i64,
        #[serde(default = "one")]
        mass: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub fp_tol: f64,
    pub fp_max_iter: i64,
    pub krylov_tol: f64,
    pub krylov_max_iter: i64,
    pub linear_solver: String,
}

impl Default for SolverSection {
    fn default() -> Self {
        let base = SolverConfig::new(1.0);
        Self {
            fp_tol: base.fp_tol,
            fp_max_iter: base.fp_max_iter as i64,
            krylov_tol: base.krylov_tol,
            krylov_max_iter: base.krylov_max_iter as i64,
            linear_solver: "fourier-fixed-point".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Interior snapshots; `t = 0` and `t = T` are always written.
    pub snapshots: i64,
    pub prefix: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("output"),
            snapshots: 50,
            prefix: "run".into(),
        }
    }
}

fn invalid(key: &str, message: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("{key}: {message}"))
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_config_str(&text).map_err(|e| match e {
        HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    /// Serializes the configuration with every default filled in.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.grid.bounds.len();
        if !(1..=2).contains(&dim) {
            return Err(invalid("grid.bounds", format!("expected 1 or 2 axes, got {dim}")));
        }
        for (i, [lo, hi]) in self.grid.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(invalid(&format!("grid.bounds[{i}]"), format!("[{lo}, {hi}] is not an interval")));
            }
        }
        let modes = self.grid.modes;
        if modes < 8 || !(modes as u64).is_power_of_two() {
            return Err(invalid("grid.modes", format!("must be a power of two >= 8, got {modes}")));
        }

        self.scheme()?;
        let (dt, t_final) = (self.scheme.dt, self.scheme.t_final);
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("scheme.dt", format!("must be positive, got {dt}")));
        }
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(invalid("scheme.t_final", format!("must be positive, got {t_final}")));
        }
        step_count(t_final, dt).ok_or_else(|| {
            invalid(
                "scheme.t_final",
                format!("{t_final} is not an integer multiple of dt = {dt}"),
            )
        })?;

        self.validate_model(dim)?;
        self.validate_init(dim)?;

        let s = &self.solver;
        if !(s.fp_tol > 0.0) {
            return Err(invalid("solver.fp_tol", "must be positive"));
        }
        if !(s.krylov_tol > 0.0) {
            return Err(invalid("solver.krylov_tol", "must be positive"));
        }
        if s.fp_max_iter < 1 {
            return Err(invalid("solver.fp_max_iter", "must be at least 1"));
        }
        if s.krylov_max_iter < 1 {
            return Err(invalid("solver.krylov_max_iter", "must be at least 1"));
        }
        self.linear_solver()?;
        if self.output.snapshots < 0 {
            return Err(invalid("output.snapshots", "must be nonnegative"));
        }
        Ok(())
    }

    fn validate_model(&self, dim: usize) -> Result<()> {
        let m = &self.model;
        let alpha = m.alpha1.is_some() || m.alpha2.is_some();
        if alpha && (m.beta.is_some() || m.lambda.is_some() || m.sigma.is_some()) {
            return Err(invalid(
                "model",
                "alpha1/alpha2 cannot be combined with beta, sigma or lambda",
            ));
        }
        if let Some(sigma) = m.sigma {
            if sigma < 1 {
                return Err(invalid("model.sigma", format!("must be a positive integer, got {sigma}")));
            }
        }
        let strength = if alpha { m.alpha1.unwrap_or(0.0) } else { m.lambda.unwrap_or(0.0) };
        let has_kernel = m.kernel.is_some() || m.dipole_axis.is_some();
        if m.kernel.is_some() && m.dipole_axis.is_some() {
            return Err(invalid("model.kernel", "a dipolar model cannot also declare a kernel"));
        }
        if strength != 0.0 && !has_kernel {
            return Err(invalid("model.kernel", "a nonlocal strength requires a kernel or dipole_axis"));
        }
        if strength == 0.0 && has_kernel {
            return Err(invalid("model.kernel", "a kernel requires a nonzero lambda or alpha1"));
        }
        if let Some(KernelConfig::Box { width } | KernelConfig::Gaussian { width }) = &m.kernel {
            if !(*width > 0.0) {
                return Err(invalid("model.kernel.width", format!("must be positive, got {width}")));
            }
        }
        if matches!(m.kernel, Some(KernelConfig::Coulomb2d)) && dim != 2 {
            return Err(invalid("model.kernel", "coulomb2d requires a 2D grid"));
        }
        if let Some(axis) = m.dipole_axis {
            let norm = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(invalid("model.dipole_axis", format!("must be a unit vector, |n| = {norm}")));
            }
            if dim != 2 {
                return Err(invalid("model.dipole_axis", "requires a 2D grid"));
            }
        }
        if m.trap.is_some() && dim != 2 {
            return Err(invalid("model.trap", "requires a 2D grid"));
        }
        if m.omega != 0.0 && dim != 2 {
            return Err(invalid("model.omega", "rotation requires a 2D grid"));
        }
        Ok(())
    }

    fn validate_init(&self, dim: usize) -> Result<()> {
        match &self.init {
            InitConfig::Gaussian { width, center, .. } => {
                if !(*width > 0.0) {
                    return Err(invalid("init.width", "must be positive"));
                }
                if let Some(c) = center {
                    if c.len() != dim {
                        return Err(invalid("init.center", format!("expected {dim} coordinates")));
                    }
                }
            }
            InitConfig::TanhPair { width, .. } => {
                if dim != 1 {
                    return Err(invalid("init", "tanh-pair requires a 1D grid"));
                }
                match width {
                    Some(w) if !(*w > 0.0) => return Err(invalid("init.width", "must be positive")),
                    Some(_) => {}
                    None => {
                        let kernel_width = match self.model.kernel {
                            Some(KernelConfig::Box { width } | KernelConfig::Gaussian { width }) => Some(width),
                            _ => None,
                        };
                        if kernel_width.is_none() || self.model.alpha2.is_none() {
                            return Err(invalid(
                                "init.width",
                                "required unless the model has a kernel width and alpha2",
                            ));
                        }
                    }
                }
            }
            InitConfig::Vortex { charge, .. } | InitConfig::GaussianVortex { charge, .. } => {
                if dim != 2 {
                    return Err(invalid("init", "vortex data require a 2D grid"));
                }
                if *charge < 0 {
                    return Err(invalid("init.charge", "must be nonnegative"));
                }
                if let InitConfig::GaussianVortex { mass, .. } = &self.init {
                    if !(*mass > 0.0) {
                        return Err(invalid("init.mass", "must be positive"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn scheme(&self) -> Result<Scheme> {
        self.scheme
            .name
            .parse()
            .map_err(|_| invalid("scheme.name", format!("unknown scheme '{}'", self.scheme.name)))
    }

    pub fn linear_solver(&self) -> Result<LinearSolver> {
        match self.solver.linear_solver.as_str() {
            "fourier-fixed-point" => Ok(LinearSolver::FourierFixedPoint),
            "preconditioned-krylov" => Ok(LinearSolver::PreconditionedKrylov),
            other => Err(invalid("solver.linear_solver", format!("unknown solver '{other}'"))),
        }
    }

    /// Number of steps to `t_final`.
    pub fn steps(&self) -> u64 {
        step_count(self.scheme.t_final, self.scheme.dt).expect("validated")
    }

    pub fn build_grid(&self) -> Result<Arc<SpectralGrid>> {
        let bounds: Vec<(f64, f64)> = self.grid.bounds.iter().map(|b| (b[0], b[1])).collect();
        SpectralGrid::new(&bounds, self.grid.modes as usize)
            .map(Arc::new)
            .map_err(|e| invalid("grid", e))
    }

    pub fn build_model(&self, grid: &Arc<SpectralGrid>) -> Result<ModelSpec> {
        let m = &self.model;
        let kernel = match &m.kernel {
            Some(KernelConfig::Box { width }) => Some(KernelSymbol::box_kernel(grid, *width)),
            Some(KernelConfig::Gaussian { width }) => Some(KernelSymbol::gaussian(grid, *width)),
            Some(KernelConfig::Coulomb2d) => Some(KernelSymbol::coulomb_2d(grid)),
            None => None,
        }
        .transpose()
        .map_err(|e| invalid("model.kernel", e))?
        .map(Arc::new);

        let mut model = if m.alpha1.is_some() || m.alpha2.is_some() {
            ModelSpec::cubic_quintic(m.alpha1.unwrap_or(0.0), m.alpha2.unwrap_or(0.0), kernel)
                .map_err(|e| invalid("model", e))?
        } else {
            let base = ModelSpec::new(m.beta.unwrap_or(0.0), m.sigma.unwrap_or(1) as u32).map_err(|e| invalid("model", e))?;
            let lambda = m.lambda.unwrap_or(0.0);
            match (kernel, m.dipole_axis) {
                (Some(k), _) => base.with_nonlocal(lambda, k),
                (None, Some(axis)) => base.with_dipolar(lambda, grid, axis),
                (None, None) => Ok(base),
            }
            .map_err(|e| invalid("model", e))?
        };
        if let Some([gx1, gx2]) = m.trap {
            model = model
                .with_harmonic_trap(grid, gx1, gx2)
                .map_err(|e| invalid("model.trap", e))?;
        }
        Ok(model.with_rotation(m.omega))
    }

    pub fn solver_config(&self, dt: f64) -> Result<SolverConfig> {
        Ok(SolverConfig {
            dt,
            fp_tol: self.solver.fp_tol,
            fp_max_iter: self.solver.fp_max_iter as usize,
            krylov_tol: self.solver.krylov_tol,
            krylov_max_iter: self.solver.krylov_max_iter as usize,
            linear_solver: self.linear_solver()?,
        })
    }
}

/// `t_final / dt` when it is an integer up to a few ulps.
pub fn step_count(t_final: f64, dt: f64) -> Option<u64> {
    let ratio = t_final / dt;
    let rounded = ratio.round();
    if rounded >= 1.0 && (ratio - rounded).abs() <= 4.0 * f64::EPSILON * rounded {
        Some(rounded as u64)
    } else {
        None
    }
}
