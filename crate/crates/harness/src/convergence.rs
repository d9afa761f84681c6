//! Time-step refinement studies against a fine self-reference.
//!
//! Each requested `dt` is rounded to `T / N` with `N = ceil(T / dt)` so that
//! every run ends exactly at `T`. The reference run uses `20 N_max` steps,
//! where `N_max` belongs to the smallest requested step.

use std::path::Path;

use nlsrelax_core::spectral::ComplexField;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::run::simulate;

/// Energy errors at or below this level count as conserved.
pub const CONSERVED_LEVEL: f64 = 1e-10;
/// Reference refinement factor.
pub const REFERENCE_FACTOR: u64 = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub dt_requested: f64,
    /// `T / steps`.
    pub dt: f64,
    pub steps: u64,
    /// Relative discrete L2 distance to the reference at `T`.
    pub solution_error: Option<f64>,
    /// `max_n |E_n - E_0| / |E_0|`.
    pub energy_error: Option<f64>,
    pub mass_error: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub reference_dt: f64,
    /// Least-squares slope of `log(solution error)` against `log(dt)`.
    pub solution_slope: Option<f64>,
    /// Same for the energy error; `None` when every row is conserved.
    pub energy_slope: Option<f64>,
    pub energy_conserved: bool,
}

/// `ceil(t_final / dt)`, tolerant of `dt` dividing `t_final` up to rounding.
pub fn steps_for(t_final: f64, dt: f64) -> u64 {
    crate::config::step_count(t_final, dt).unwrap_or_else(|| (t_final / dt).ceil() as u64)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn relative_distance(a: &ComplexField, reference: &ComplexField) -> f64 {
    let diff: f64 = a
        .values()
        .iter()
        .zip(reference.values())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    let norm: f64 = reference.values().iter().map(|y| y.norm_sqr()).sum();
    (diff / norm).sqrt()
}

/// Runs `config` at every step in `dts` and at the reference step. Rows run
/// concurrently; a failing row is recorded and the others continue.
pub fn convergence_study(config: &ExperimentConfig, dts: &[f64]) -> Result<ConvergenceTable> {
    config.validate()?;
    if dts.len() < 3 {
        return Err(HarnessError::Config(format!("dts: need at least 3 time steps, got {}", dts.len())));
    }
    if let Some(bad) = dts.iter().find(|dt| !(dt.is_finite() && **dt > 0.0)) {
        return Err(HarnessError::Config(format!("dts: {bad} is not a positive time step")));
    }
    let t_final = config.scheme.t_final;
    let max = dts.iter().copied().fold(f64::MIN, f64::max);
    let min = dts.iter().copied().fold(f64::MAX, f64::min);
    if max / min < 10.0 * (1.0 - 1e-12) {
        return Err(HarnessError::Config(format!(
            "dts: must span at least one decade, got [{min}, {max}]"
        )));
    }
    if dts.iter().any(|dt| *dt > t_final) {
        return Err(HarnessError::Config("dts: a time step exceeds t_final".into()));
    }

    let reference_steps = REFERENCE_FACTOR * steps_for(t_final, min);
    let reference_dt = t_final / reference_steps as f64;

    let run = |steps: u64| -> Result<(ComplexField, f64, f64)> {
        let dt = t_final / steps as f64;
        let (integrator, stats) = simulate(config, dt, steps, |_, _| Ok(()))?;
        Ok((integrator.phi().clone(), stats.max_energy_error, stats.max_mass_error))
    };

    let (reference, results) = std::thread::scope(|scope| {
        let reference = scope.spawn(|| run(reference_steps));
        let handles: Vec<_> = dts
            .iter()
            .map(|&dt| scope.spawn(move || run(steps_for(t_final, dt))))
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().expect("row thread")).collect();
        (reference.join().expect("reference thread"), results)
    });
    let (reference, _, _) = reference?;

    let rows: Vec<ConvergenceRow> = dts
        .iter()
        .zip(results)
        .map(|(&dt_requested, result)| {
            let steps = steps_for(t_final, dt_requested);
            let mut row = ConvergenceRow {
                dt_requested,
                dt: t_final / steps as f64,
                steps,
                solution_error: None,
                energy_error: None,
                mass_error: None,
                failure: None,
            };
            match result {
                Ok((phi, energy, mass)) => {
                    row.solution_error = Some(relative_distance(&phi, &reference));
                    row.energy_error = Some(energy);
                    row.mass_error = Some(mass);
                }
                Err(e) => row.failure = Some(e.to_string()),
            }
            row
        })
        .collect();

    let solution: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| Some((r.dt, r.solution_error?)))
        .collect();
    let energy: Vec<(f64, f64)> = rows.iter().filter_map(|r| Some((r.dt, r.energy_error?))).collect();
    let energy_conserved = !energy.is_empty() && energy.iter().all(|(_, e)| *e <= CONSERVED_LEVEL);
    Ok(ConvergenceTable {
        solution_slope: loglog_slope(&solution),
        energy_slope: if energy_conserved { None } else { loglog_slope(&energy) },
        energy_conserved,
        reference_dt,
        rows,
    })
}

/// Writes the table as CSV.
pub fn write_table(table: &ConvergenceTable, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    writer
        .write_record(["dt", "steps", "solution_error", "energy_error", "mass_error", "status"])
        .map_err(|e| HarnessError::csv(path, e))?;
    for row in &table.rows {
        let status = row.failure.clone().unwrap_or_else(|| "ok".into());
        writer
            .write_record([
                format!("{:e}", row.dt),
                row.steps.to_string(),
                opt(row.solution_error),
                opt(row.energy_error),
                opt(row.mass_error),
                status,
            ])
            .map_err(|e| HarnessError::csv(path, e))?;
    }
    writer.flush().map_err(|e| HarnessError::io(path, e))
}
