use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nlsrelax::config::ExperimentConfig;
use nlsrelax::convergence::write_table;
use nlsrelax::io::output_stem;
use nlsrelax::{convergence_study, experiments, parse_config, run_experiment, HarnessError, Result};

#[derive(Parser)]
#[command(name = "nlsrelax", version, about = "Energy-preserving NLS/GPE time integrators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file or a named experiment.
    Run {
        config: String,
        /// Output directory (overrides `output.dir`).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time-step refinement study of a configuration.
    Converge {
        config: String,
        /// Comma-separated time steps.
        #[arg(long, value_delimiter = ',', required = true)]
        dts: Vec<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List the canned experiments.
    ListExperiments,
    /// Print the resolved configuration of a canned experiment.
    Describe { experiment: String },
}

fn load(source: &str) -> Result<ExperimentConfig> {
    let path = Path::new(source);
    if path.exists() {
        return parse_config(path);
    }
    experiments::experiment(source)
        .map(|e| e.config)
        .ok_or_else(|| HarnessError::Config(format!("{source}: no such file or experiment")))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, output } => {
            let config = load(&config)?;
            print!("{}", config.to_toml());
            let out = run_experiment(&config, output.as_deref())?;
            println!("diagnostics: {}", out.diagnostics.display());
            println!("snapshots: {}", out.snapshots.len());
            println!("max relative energy error: {:e}", out.stats.max_energy_error);
            println!("max relative mass error: {:e}", out.stats.max_mass_error);
        }
        Command::Converge { config, dts, output } => {
            let config = load(&config)?;
            let table = convergence_study(&config, &dts)?;
            println!("reference dt: {:e}", table.reference_dt);
            println!("{:>14} {:>8} {:>14} {:>14} {:>14}", "dt", "steps", "solution", "energy", "mass");
            let cell = |v: Option<f64>| v.map(|x| format!("{x:14.6e}")).unwrap_or_else(|| format!("{:>14}", "-"));
            for row in &table.rows {
                println!(
                    "{:14.6e} {:>8} {} {} {}{}",
                    row.dt,
                    row.steps,
                    cell(row.solution_error),
                    cell(row.energy_error),
                    cell(row.mass_error),
                    row.failure.as_deref().map(|f| format!("  FAILED: {f}")).unwrap_or_default()
                );
            }
            match table.solution_slope {
                Some(s) => println!("solution error slope: {s:.4}"),
                None => println!("solution error slope: n/a"),
            }
            match (table.energy_conserved, table.energy_slope) {
                (true, _) => println!("energy error: conserved"),
                (false, Some(s)) => println!("energy error slope: {s:.4}"),
                (false, None) => println!("energy error slope: n/a"),
            }
            let dir = output.unwrap_or_else(|| config.output.dir.clone());
            std::fs::create_dir_all(&dir).map_err(|e| HarnessError::Io { path: dir.clone(), source: e })?;
            let scheme = config.scheme()?;
            let stem = output_stem(&config.output.prefix, scheme, table.reference_dt);
            let path = dir.join(format!("{stem}_convergence.csv"));
            write_table(&table, &path)?;
            println!("table: {}", path.display());
            let failed = table.rows.iter().filter(|r| r.failure.is_some()).count();
            if failed > 0 {
                return Err(HarnessError::SweepFailed {
                    failed,
                    total: table.rows.len(),
                });
            }
        }
        Command::ListExperiments => {
            for exp in experiments::catalog() {
                println!("{:<34} {}", exp.name, exp.summary);
            }
        }
        Command::Describe { experiment } => {
            let exp = experiments::experiment(&experiment)
                .ok_or_else(|| HarnessError::Config(format!("unknown experiment '{experiment}'")))?;
            println!("# {}", exp.summary);
            print!("{}", exp.config.to_toml());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
