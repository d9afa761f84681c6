//! Canned experiment configurations.

use std::f64::consts::PI;

use crate::config::{
    ExperimentConfig, GridConfig, InitConfig, KernelConfig, ModelConfig, OutputConfig, SchemeConfig, SolverSection,
};

/// A named configuration with a one-line description.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: &'static str,
    pub summary: &'static str,
    pub config: ExperimentConfig,
}

pub const NAMES: [&str; 8] = [
    "quintic",
    "septic",
    "dark-solitons-defocusing-mu0.5",
    "dark-solitons-defocusing-mu2.5",
    "dark-solitons-focusing-mu0.5",
    "dark-solitons-focusing-mu2.5",
    "vortex-2d",
    "dipolar-bec",
];

pub fn catalog() -> Vec<Experiment> {
    NAMES.iter().map(|name| experiment(name).expect("catalog entry")).collect()
}

pub fn experiment(name: &str) -> Option<Experiment> {
    let (summary, config) = match name {
        "quintic" => ("1D quintic NLS, Gaussian datum, beta = -1", power_benchmark(2)),
        "septic" => ("1D septic NLS, Gaussian datum, beta = -1", power_benchmark(3)),
        "dark-solitons-defocusing-mu0.5" => (
            "dark-soliton pair, box kernel mu = 0.5, alpha2 = -0.5",
            dark_solitons(0.5, -0.5),
        ),
        "dark-solitons-defocusing-mu2.5" => (
            "dark-soliton pair, box kernel mu = 2.5, alpha2 = -0.5 (breathing)",
            dark_solitons(2.5, -0.5),
        ),
        "dark-solitons-focusing-mu0.5" => (
            "dark-soliton pair, box kernel mu = 0.5, alpha2 = 0.1",
            dark_solitons(0.5, 0.1),
        ),
        "dark-solitons-focusing-mu2.5" => (
            "dark-soliton pair, box kernel mu = 2.5, alpha2 = 0.1",
            dark_solitons(2.5, 0.1),
        ),
        "vortex-2d" => (
            "2D vortex soliton, Gaussian kernel mu = 0.4, cubic-quintic",
            vortex(),
        ),
        "dipolar-bec" => (
            "rotating dipolar condensate in a harmonic trap, Gaussian-vortex datum",
            dipolar(),
        ),
        _ => return None,
    };
    let name = NAMES.iter().find(|n| **n == name)?;
    let mut config = config;
    config.name = Some(name.to_string());
    config.output.prefix = name.to_string();
    Some(Experiment {
        name,
        summary,
        config,
    })
}

fn scheme(name: &str, dt: f64, t_final: f64) -> SchemeConfig {
    SchemeConfig {
        name: name.into(),
        dt,
        t_final,
    }
}

// Long runs accumulate the per-step solver residual in mass and energy, so
// the canned runs solve to near round-off.
fn tight_solver() -> SolverSection {
    SolverSection {
        fp_tol: 1e-14,
        krylov_tol: 1e-14,
        ..SolverSection::default()
    }
}

fn power_benchmark(sigma: i64) -> ExperimentConfig {
    ExperimentConfig {
        name: None,
        grid: GridConfig {
            bounds: vec![[-30.0, 30.0]],
            modes: 1 << 13,
        },
        model: ModelConfig {
            beta: Some(-1.0),
            sigma: Some(sigma),
            ..ModelConfig::default()
        },
        scheme: scheme("generalized-relaxation", 1e-3, 0.5),
        init: InitConfig::Gaussian {
            amplitude: 1.0,
            width: 1.0,
            center: None,
        },
        solver: tight_solver(),
        output: OutputConfig::default(),
    }
}

fn dark_solitons(mu: f64, alpha2: f64) -> ExperimentConfig {
    ExperimentConfig {
        name: None,
        grid: GridConfig {
            bounds: vec![[-256.0 * PI, 256.0 * PI]],
            modes: 1 << 14,
        },
        model: ModelConfig {
            alpha1: Some(-1.0),
            alpha2: Some(alpha2),
            kernel: Some(KernelConfig::Box { width: mu }),
            ..ModelConfig::default()
        },
        scheme: scheme("generalized-relaxation", 5e-3, 30.0),
        init: InitConfig::TanhPair { x0: 1.0, width: None },
        solver: tight_solver(),
        output: OutputConfig::default(),
    }
}

fn vortex() -> ExperimentConfig {
    ExperimentConfig {
        name: None,
        grid: GridConfig {
            bounds: vec![[-8.0, 8.0], [-8.0, 8.0]],
            modes: 256,
        },
        model: ModelConfig {
            alpha1: Some(1.0),
            alpha2: Some(-0.02),
            kernel: Some(KernelConfig::Gaussian { width: 0.4 }),
            ..ModelConfig::default()
        },
        scheme: scheme("generalized-relaxation", 5e-3, 10.0),
        init: InitConfig::Vortex {
            amplitude: 5.8,
            charge: 1,
        },
        solver: tight_solver(),
        output: OutputConfig::default(),
    }
}

fn dipolar() -> ExperimentConfig {
    let lambda = 175.0;
    ExperimentConfig {
        name: None,
        grid: GridConfig {
            bounds: vec![[-16.0, 16.0], [-16.0, 16.0]],
            modes: 256,
        },
        model: ModelConfig {
            beta: Some((250.0 - lambda) * (5.0 / PI).sqrt()),
            sigma: Some(1),
            lambda: Some(lambda),
            omega: 0.97,
            dipole_axis: Some([(PI / 3.0).cos(), (PI / 3.0).sin(), 0.0]),
            trap: Some([1.0, 1.0]),
            ..ModelConfig::default()
        },
        scheme: scheme("relaxation", 1e-3, 20.0),
        init: InitConfig::GaussianVortex { charge: 1, mass: 1.0 },
        solver: SolverSection {
            linear_solver: "preconditioned-krylov".into(),
            ..tight_solver()
        },
        output: OutputConfig::default(),
    }
}
