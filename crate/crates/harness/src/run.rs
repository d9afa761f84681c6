//! Running a configured experiment.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nlsrelax_core::integrators::{AuxInit, Integrator};
use nlsrelax_core::observables::DiagnosticsRecord;
use nlsrelax_core::spectral::{ComplexField, SpectralGrid};

use crate::config::{ExperimentConfig, InitConfig, KernelConfig};
use crate::error::{HarnessError, Result};
use crate::initial::{gaussian, gaussian_vortex, soliton_width, tanh_pair, vortex_initial};
use crate::io::{output_stem, write_snapshot, DiagnosticsWriter};

fn core_error(step: u64, source: nlsrelax_core::Error) -> HarnessError {
    use nlsrelax_core::Error as E;
    match source {
        E::NoConvergence { .. } | E::NegativeAuxiliary { .. } => HarnessError::Solver { step, source },
        other => HarnessError::Config(other.to_string()),
    }
}

/// Samples the configured initial datum on `grid`.
pub fn initial_field(config: &ExperimentConfig, grid: &Arc<SpectralGrid>) -> Result<ComplexField> {
    Ok(match &config.init {
        InitConfig::Gaussian {
            amplitude,
            width,
            center,
        } => {
            let mut c = [0.0; 2];
            if let Some(center) = center {
                c[..center.len()].copy_from_slice(center);
            }
            gaussian(grid, *amplitude, *width, c)
        }
        InitConfig::TanhPair { x0, width } => {
            let d = match width {
                Some(d) => *d,
                None => {
                    let mu = match config.model.kernel {
                        Some(KernelConfig::Box { width } | KernelConfig::Gaussian { width }) => width,
                        _ => return Err(HarnessError::Config("init.width: no kernel width to derive it from".into())),
                    };
                    let alpha2 = config
                        .model
                        .alpha2
                        .ok_or_else(|| HarnessError::Config("init.width: no alpha2 to derive it from".into()))?;
                    soliton_width(mu, alpha2)?
                }
            };
            tanh_pair(grid, d, *x0)
        }
        InitConfig::Vortex { amplitude, charge } => vortex_initial(grid, *amplitude, *charge as u32),
        InitConfig::GaussianVortex { charge, mass } => gaussian_vortex(grid, *charge as u32, *mass),
    })
}

/// Builds the integrator for `config` with time step `dt`.
pub fn build_integrator(config: &ExperimentConfig, dt: f64) -> Result<Integrator> {
    let grid = config.build_grid()?;
    let model = config.build_model(&grid)?;
    let phi0 = initial_field(config, &grid)?;
    let solver = config.solver_config(dt)?;
    Integrator::new(config.scheme()?, model, solver, phi0, &AuxInit::ReverseCnHalfStep).map_err(|e| core_error(0, e))
}

/// Extremes of a finished or aborted run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    /// Completed steps.
    pub steps: u64,
    pub max_energy_error: f64,
    /// Largest `|m_n - m_0| / m_0`.
    pub max_mass_error: f64,
}

/// Advances `steps` steps of size `dt`, calling `observe` on step 0 and
/// after every step. Returns the final integrator.
pub fn simulate(
    config: &ExperimentConfig,
    dt: f64,
    steps: u64,
    mut observe: impl FnMut(&Integrator, &DiagnosticsRecord) -> Result<()>,
) -> Result<(Integrator, RunStats)> {
    let mut integrator = build_integrator(config, dt)?;
    let energy0 = integrator.scheme_energy().map_err(|e| core_error(0, e))?;
    let mass0 = integrator.mass();
    let mut stats = RunStats::default();
    let first = DiagnosticsRecord::new(0, 0.0, mass0, energy0, energy0, Default::default());
    observe(&integrator, &first)?;
    for n in 1..=steps {
        let report = integrator.step().map_err(|e| core_error(n, e))?;
        let energy = integrator.scheme_energy().map_err(|e| core_error(n, e))?;
        let mass = integrator.mass();
        let record = DiagnosticsRecord::new(n, n as f64 * dt, mass, energy, energy0, report);
        stats.steps = n;
        stats.max_energy_error = stats.max_energy_error.max(record.rel_energy_error);
        stats.max_mass_error = stats.max_mass_error.max(relative(mass, mass0));
        observe(&integrator, &record)?;
    }
    Ok((integrator, stats))
}

fn relative(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        value.abs()
    } else {
        ((value - reference) / reference).abs()
    }
}

/// Steps at which snapshots are written: `t = 0`, `interior` evenly spaced
/// interior times, and `t = T`.
pub fn snapshot_steps(steps: u64, interior: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..=interior + 1)
        .map(|k| ((k as u128 * steps as u128 + (interior as u128 + 1) / 2) / (interior as u128 + 1)) as u64)
        .collect();
    out.dedup();
    out
}

/// Output files of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub diagnostics: PathBuf,
    pub snapshots: Vec<PathBuf>,
    pub stats: RunStats,
}

/// Runs `config` to `t_final`, writing one CSV row per step (plus `t = 0`)
/// and the snapshot series into `output_dir` (default: the configured
/// directory). A failing step leaves the rows and snapshots written so far.
pub fn run_experiment(config: &ExperimentConfig, output_dir: Option<&Path>) -> Result<RunOutput> {
    config.validate()?;
    let dir = output_dir.unwrap_or(&config.output.dir).to_path_buf();
    std::fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
    let scheme = config.scheme()?;
    let dt = config.scheme.dt;
    let steps = config.steps();
    let stem = output_stem(&config.output.prefix, scheme, dt);

    let diagnostics = dir.join(format!("{stem}.csv"));
    let mut writer = DiagnosticsWriter::create(&diagnostics)?;
    let cadence = snapshot_steps(steps, config.output.snapshots as u64);
    let mut snapshots = Vec::with_capacity(cadence.len());

    let (_, stats) = simulate(config, dt, steps, |integrator, record| {
        writer.write(record)?;
        if cadence.binary_search(&record.step).is_ok() {
            let path = write_snapshot(
                &dir,
                &format!("{stem}_snap{:04}", snapshots.len()),
                integrator.phi(),
                record.step,
                record.time,
                scheme,
                dt,
                integrator.model(),
            )?;
            snapshots.push(path);
        }
        Ok(())
    })?;
    Ok(RunOutput {
        diagnostics,
        snapshots,
        stats,
    })
}
