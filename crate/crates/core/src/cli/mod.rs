//! Command-line front end.
//!
//! Exit codes: 0 when the run docked, 2 when it ended in any failure
//! outcome, 1 for usage, parse and IO errors.

pub mod export;
pub mod files;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::controllers::{ControlError, Controllers};
use crate::simulation::{self, ModeSelection, RunMode};

pub use files::{ScenarioFile, SweepFile};

pub const EXIT_DOCKED: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Control(#[from] ControlError),
}

#[derive(Debug, Parser)]
#[command(name = "trailer-backer", version, about = "Back a truck and trailer to a loading dock with cascaded fuzzy control")]
pub struct Cli {
    /// JSON document overriding both controller definitions.
    #[arg(long, global = true, value_name = "PATH")]
    pub controllers: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and export its trajectory.
    Run {
        #[arg(long, value_name = "PATH")]
        scenario: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Overrides the scenario's mode: cascade, reference or both.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        max_steps: Option<usize>,
        /// Draw a trailer heading tick every N steps.
        #[arg(long, default_value_t = 10)]
        tick_every: usize,
    },
    /// Run the cascade from every point of a grid of initial states.
    Sweep {
        #[arg(long, value_name = "PATH")]
        grid: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Tabulate a controller's output over a uniform input grid.
    Surface {
        /// flc_t or flc_c.
        #[arg(long)]
        controller: String,
        #[arg(long)]
        resolution: usize,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_DOCKED };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn create_file(path: &Path) -> Result<fs::File, CliError> {
    fs::File::create(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn load_controllers(path: Option<&Path>) -> Result<Controllers, CliError> {
    match path {
        None => Ok(Controllers::default()),
        Some(p) => Controllers::from_json(&read(p)?)
            .map_err(|e| CliError::Parse(format!("{}: {e}", p.display()))),
    }
}

fn parse_mode(s: &str) -> Result<ModeSelection, CliError> {
    match s {
        "cascade" => Ok(ModeSelection::Cascade),
        "reference" => Ok(ModeSelection::Reference),
        "both" => Ok(ModeSelection::Both),
        other => Err(CliError::Usage(format!("unknown mode {other:?}; expected cascade, reference or both"))),
    }
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let controllers = load_controllers(cli.controllers.as_deref())?;
    match &cli.command {
        Command::Run { scenario, out, mode, max_steps, tick_every } => {
            cmd_run(&controllers, scenario, out, mode.as_deref(), *max_steps, *tick_every)
        }
        Command::Sweep { grid, out, max_steps } => cmd_sweep(&controllers, grid, out, *max_steps),
        Command::Surface { controller, resolution, out } => {
            cmd_surface(&controllers, controller, *resolution, out)
        }
    }
}

pub fn cmd_run(
    controllers: &Controllers,
    scenario_path: &Path,
    out: &Path,
    mode: Option<&str>,
    max_steps: Option<usize>,
    tick_every: usize,
) -> Result<i32, CliError> {
    let file = ScenarioFile::parse(&read(scenario_path)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", scenario_path.display())))?;
    let mut scenario = file.into_scenario()?;
    if let Some(m) = mode {
        scenario.mode = parse_mode(m)?;
    }
    if let Some(n) = max_steps {
        if n < 1 {
            return Err(CliError::Usage("--max-steps must be at least 1".into()));
        }
        scenario.max_steps = n;
    }

    let runs = simulation::run(&scenario, controllers);

    create_dir(out)?;
    export::write_trajectories(create_file(&out.join("trajectory.csv"))?, &runs)?;
    write(&out.join("outcome.json"), export::outcome_json(&scenario, &runs))?;
    write(&out.join("trajectory.svg"), export::trajectory_svg(&scenario, &runs, tick_every))?;

    for t in &runs {
        println!("{} [{}]: {} after {} steps", scenario.label, t.mode.as_str(), t.outcome.kind, t.outcome.steps);
        if let Some(m) = &t.outcome.message {
            eprintln!("{}: {m}", t.mode.as_str());
        }
    }
    let decisive = runs
        .iter()
        .find(|t| t.mode == RunMode::Cascade)
        .or_else(|| runs.first())
        .expect("at least one mode runs");
    Ok(if decisive.docked() { EXIT_DOCKED } else { EXIT_FAILED })
}

pub fn cmd_sweep(
    controllers: &Controllers,
    grid_path: &Path,
    out: &Path,
    max_steps: Option<usize>,
) -> Result<i32, CliError> {
    let file = SweepFile::parse(&read(grid_path)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", grid_path.display())))?;
    let mut template = file.template()?;
    if let Some(n) = max_steps {
        if n < 1 {
            return Err(CliError::Usage("--max-steps must be at least 1".into()));
        }
        template.max_steps = n;
    }
    let report = simulation::sweep(&file.grid(), &template, controllers)
        .map_err(|e| CliError::Invalid(e.to_string()))?;

    create_dir(out)?;
    export::write_sweep(create_file(&out.join("sweep.csv"))?, &report)?;
    write(&out.join("summary.json"), export::sweep_summary_json(&report))?;
    println!(
        "{} cells, success ratio {:.3}",
        report.cells.len(),
        report.success_ratio
    );
    Ok(EXIT_DOCKED)
}

pub fn cmd_surface(
    controllers: &Controllers,
    controller: &str,
    resolution: usize,
    out: &Path,
) -> Result<i32, CliError> {
    if resolution < 2 {
        return Err(CliError::Usage("--resolution must be at least 2".into()));
    }
    match controller {
        "flc_t" => export::write_trailer_surface(create_file(out)?, controllers, resolution)?,
        "flc_c" => export::write_cab_surface(create_file(out)?, controllers, resolution)?,
        other => {
            return Err(CliError::Usage(format!("unknown controller {other:?}; expected flc_t or flc_c")))
        }
    }
    Ok(EXIT_DOCKED)
}
