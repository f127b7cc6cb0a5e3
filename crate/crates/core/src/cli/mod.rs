//! Command-line experiment driver.
//!
//! Exit codes: 0 success, 2 invalid configuration (nothing written),
//! 3 runtime failure.

mod config;
mod plots;
mod run;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{
    DataConfig, Experiment, GridAxis, InitialState, LandscapeConfig, OptimizerConfig, RunConfig, TorusReportConfig,
};
pub use plots::{emit_plots, heatmap, projection_table, series_table, trace_table, PlotOptions};
pub use run::{
    config_from_metadata, default_out_dir, execute, torus_distinguishability, Mode, RunError, RunSummary, EXIT_CONFIG,
    EXIT_RUNTIME,
};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "DELAYID_THREADS";

#[derive(Debug, Parser)]
#[command(name = "delayid", version, about = "Parameter identification from delay-coordinate invariant measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate data, optimize and write all artifacts.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the objective on a parameter grid.
    Scan {
        config: PathBuf,
        /// `start:stop:step`, once per free parameter.
        #[arg(long = "grid")]
        grid: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write long-format plot tables for a finished run.
    EmitPlots {
        run_dir: PathBuf,
        /// Delay coordinates of the 2-D projection, e.g. `0,1`.
        #[arg(long, default_value = "0,1")]
        coords: String,
        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
}

fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn load(config: &PathBuf, seed: Option<u64>, out: Option<PathBuf>) -> Result<(RunConfig, PathBuf), RunError> {
    let mut cfg = RunConfig::load(config).map_err(|error| RunError { code: EXIT_CONFIG, error })?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let out = out.unwrap_or_else(|| default_out_dir(&cfg));
    Ok((cfg, out))
}

fn dispatch(cli: Cli) -> Result<(), RunError> {
    let config_err = |error| RunError { code: EXIT_CONFIG, error };
    match cli.command {
        Command::Run { config, seed, out } => {
            let (cfg, out) = load(&config, seed, out)?;
            let summary = execute(&cfg, &out, &Mode::Run)?;
            if let Some(best) = summary.best() {
                println!("theta_star = {:?}  loss = {}", best.theta_star, best.loss_star);
            }
            println!("artifacts in {}", out.display());
        }
        Command::Scan { config, grid, seed, out } => {
            let (cfg, out) = load(&config, seed, out)?;
            let axes: Vec<GridAxis> = grid.iter().map(|g| g.parse()).collect::<Result<_, _>>().map_err(config_err)?;
            let summary = execute(&cfg, &out, &Mode::Scan(axes))?;
            println!("{} grid points written to {}", summary.landscape.len(), out.join("landscape.csv").display());
        }
        Command::EmitPlots { run_dir, coords, bins } => {
            let parsed: Vec<usize> = coords.split(',').map(|c| c.trim().parse()).collect::<Result<_, _>>().map_err(|_| {
                config_err(crate::Error::Config(format!("--coords `{coords}` is not `i,j`")))
            })?;
            if parsed.len() != 2 {
                return Err(config_err(crate::Error::Config(format!("--coords `{coords}` is not `i,j`"))));
            }
            let opts = PlotOptions { coords: (parsed[0], parsed[1]), bins };
            let files = emit_plots(&run_dir, &opts).map_err(|error| RunError { code: EXIT_RUNTIME, error })?;
            for f in files {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    init_threads();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.error);
            e.code
        }
    }
}
