//! Experiment execution and artifact writing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::config::{Experiment, GridAxis, RunConfig};
use crate::dynamics::{simulate, TorusRotation};
use crate::error::{Error, Result};
use crate::identify::{
    multi_start, observe_run, product_grid, scan_landscape, self_distance_floor, LandscapeRow, Objective, ObjectiveKind,
    OptResult,
};
use crate::measure::{
    add_noise, delay_embed_ordered, format_f64, observe, state_measure, CoordOrder, TimeSeries,
};
use crate::metrics::energy_mmd;
use crate::rng;

/// Failure of a CLI run, tagged with its exit code.
#[derive(Debug)]
pub struct RunError {
    pub code: i32,
    pub error: Error,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl std::error::Error for RunError {}

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

fn config_err(error: Error) -> RunError {
    RunError { code: EXIT_CONFIG, error }
}

fn runtime_err(error: Error) -> RunError {
    RunError { code: EXIT_RUNTIME, error }
}

type RunResult<T> = std::result::Result<T, RunError>;

#[derive(Debug, Clone)]
pub enum Mode {
    Run,
    Scan(Vec<GridAxis>),
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub restarts: Vec<OptResult>,
    pub baseline: Vec<OptResult>,
    pub landscape: Vec<LandscapeRow>,
    pub report: serde_json::Value,
}

impl RunSummary {
    pub fn best(&self) -> Option<&OptResult> {
        best_of(&self.restarts)
    }
}

fn best_of(results: &[OptResult]) -> Option<&OptResult> {
    results.iter().min_by(|a, b| a.loss_star.total_cmp(&b.loss_star))
}

/// Default output directory for a config.
pub fn default_out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from(format!("runs/{}-seed{}", cfg.experiment.name(), cfg.seed)))
}

struct Data {
    /// What the objective is evaluated against.
    series: TimeSeries,
    /// First observable of the data after burn-in.
    observed: TimeSeries,
    full_state: bool,
}

fn generate_data(cfg: &RunConfig) -> Result<Data> {
    let generator = cfg.build_generator()?;
    let x0 = cfg.data.initial_state.build(cfg.generator())?;
    let dt = cfg.generator().dt_samp();
    let full_state = cfg.optimizer.objective.needs_full_state();
    let noise_seed = rng::derive_seed(cfg.seed, 10);
    let obs = &cfg.data.observables[0];
    if full_state {
        let traj = simulate(generator.as_ref(), &x0, cfg.data.horizon)?;
        let series = add_noise(&TimeSeries::new(traj, dt, 0.0)?, cfg.data.noise_sigma, noise_seed)?;
        let states: Vec<Vec<f64>> = series.samples().map(|s| s.to_vec()).collect();
        let observed = observe(&states[cfg.data.burn_in..], obs, dt)?;
        Ok(Data { series, observed, full_state })
    } else {
        let y = observe_run(generator.as_ref(), obs, &x0, cfg.data.horizon)?;
        let series = add_noise(&TimeSeries::scalar(y, dt, 0.0)?, cfg.data.noise_sigma, noise_seed)?;
        let observed = series.slice(cfg.data.burn_in, series.len())?;
        Ok(Data { series, observed, full_state })
    }
}

fn write_text(dir: &Path, name: &str, text: &str, written: &mut Vec<String>) -> Result<()> {
    std::fs::write(dir.join(name), text)?;
    written.push(name.to_string());
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T, written: &mut Vec<String>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(dir, name, &text, written)
}

fn landscape_csv(labels: &[String], rows: &[LandscapeRow]) -> String {
    let mut out = labels.join(",");
    out.push_str(",loss\n");
    for r in rows {
        for v in &r.theta {
            out.push_str(&format_f64(*v));
            out.push(',');
        }
        let _ = writeln!(out, "{}", format_f64(r.loss));
    }
    out
}

fn error_summary(results: &[OptResult], truth: &[f64]) -> serde_json::Value {
    let errors: Vec<Vec<f64>> =
        results.iter().map(|r| r.theta_star.iter().zip(truth).map(|(a, b)| (a - b).abs()).collect()).collect();
    let flat: Vec<f64> = errors.iter().flatten().copied().collect();
    let mean = flat.iter().sum::<f64>() / flat.len().max(1) as f64;
    let best = best_of(results);
    json!({
        "theta_star": best.map(|b| b.theta_star.clone()),
        "loss_star": best.map(|b| b.loss_star),
        "restart_theta": results.iter().map(|r| r.theta_star.clone()).collect::<Vec<_>>(),
        "restart_abs_errors": errors,
        "mean_abs_error": mean,
    })
}

/// State and delay-coordinate distances between rotations of the torus.
pub fn torus_distinguishability(cfg: &RunConfig) -> Result<serde_json::Value> {
    let t = cfg.torus.as_ref().ok_or_else(|| Error::Config("torus block missing".into()))?;
    let delay = crate::measure::DelayParams::new(t.m, cfg.delay.tau_bar)?;
    let mut states = Vec::new();
    let mut delays = Vec::new();
    for p in &t.pairs {
        let model = TorusRotation::new(p[0], p[1])?;
        let traj = simulate(&model, &t.initial_state, t.n_points - 1)?;
        let y = observe(&traj, &crate::measure::Observable::coordinate(0), 1.0)?;
        states.push(state_measure(&traj, 0)?);
        delays.push(delay_embed_ordered(&y, delay, CoordOrder::Ascending)?);
    }
    let mut rows = Vec::new();
    for i in 0..t.pairs.len() {
        for j in i + 1..t.pairs.len() {
            rows.push(json!({
                "a": t.pairs[i],
                "b": t.pairs[j],
                "state_mmd": energy_mmd(&states[i], &states[j])?,
                "delay_mmd": energy_mmd(&delays[i], &delays[j])?,
            }));
        }
    }
    Ok(json!({ "n_points": t.n_points, "m": t.m, "tau_bar": cfg.delay.tau_bar, "comparisons": rows }))
}

/// `D(T_theta # mu, mu)` at the identified parameters next to the data's
/// two-subsample self-distance floor (five subsample pairs).
fn invariance_report(cfg: &RunConfig, data: &TimeSeries, theta: &[f64]) -> Result<serde_json::Value> {
    let spec = cfg.objective_spec(ObjectiveKind::StateOnly)?;
    let obj = Objective::new(spec, data)?;
    let state_term = obj.eval(theta)?;
    let states: Vec<Vec<f64>> = data.samples().map(|s| s.to_vec()).collect();
    let mu = state_measure(&states, cfg.data.burn_in)?;
    let floors: Vec<f64> = (0..5)
        .map(|i| self_distance_floor(&mu, cfg.optimizer.n_samples, &cfg.metric, rng::derive_seed(cfg.seed, 40 + i)))
        .collect::<Result<_>>()?;
    let floor = floors.iter().sum::<f64>() / floors.len() as f64;
    Ok(json!({ "state_term": state_term, "floors": floors, "floor": floor, "ratio": state_term / floor }))
}

/// Runs an experiment end to end and writes its artifacts into `out_dir`.
///
/// Nothing is written unless the configuration and the data-dependent
/// objective setup are valid.
pub fn execute(cfg: &RunConfig, out_dir: &Path, mode: &Mode) -> RunResult<RunSummary> {
    let started = Instant::now();
    cfg.validate().map_err(config_err)?;
    if cfg.optimizer.compare_pointwise && cfg.optimizer.objective.needs_full_state() {
        return Err(config_err(Error::Config(
            "optimizer.compare_pointwise needs a trajectory objective (alg1 or pointwise)".into(),
        )));
    }
    let grid_axes = match mode {
        Mode::Scan(axes) if !axes.is_empty() => Some(axes.clone()),
        Mode::Scan(_) => Some(
            cfg.landscape
                .as_ref()
                .map(|l| l.grid.clone())
                .ok_or_else(|| config_err(Error::Config("scan needs --grid or a landscape block".into())))?,
        ),
        Mode::Run => cfg.landscape.as_ref().map(|l| l.grid.clone()),
    };
    let grid = match &grid_axes {
        Some(axes) => {
            if axes.len() != cfg.model.n_free() {
                return Err(config_err(Error::Config(format!(
                    "grid: expected {} axes, got {}",
                    cfg.model.n_free(),
                    axes.len()
                ))));
            }
            let values: Vec<Vec<f64>> = axes.iter().map(|a| a.values()).collect::<Result<_>>().map_err(config_err)?;
            let points = product_grid(&values);
            for p in &points {
                cfg.optimizer.bounds.check(p).map_err(|e| config_err(Error::Config(format!("grid: {e}"))))?;
            }
            Some(points)
        }
        None => None,
    };

    let data = generate_data(cfg).map_err(runtime_err)?;
    let setup = |e: Error| if e.is_divergence() { runtime_err(e) } else { config_err(e) };
    let objective = Objective::new(cfg.objective_spec(cfg.optimizer.objective).map_err(setup)?, &data.series).map_err(setup)?;
    let baseline = if cfg.optimizer.compare_pointwise {
        Some(Objective::new(cfg.objective_spec(ObjectiveKind::Pointwise).map_err(setup)?, &data.series).map_err(setup)?)
    } else {
        None
    };
    let delay_measure = delay_embed_ordered(&data.observed, cfg.delay, CoordOrder::Ascending).map_err(setup)?;

    std::fs::create_dir_all(out_dir).map_err(|e| runtime_err(e.into()))?;
    let mut written = Vec::new();
    let mut run = || -> Result<RunSummary> {
        write_text(out_dir, "data_series.csv", &data.series.to_csv(), &mut written)?;
        write_text(out_dir, "delay_measure.csv", &delay_measure.to_csv(), &mut written)?;
        if data.full_state {
            let states: Vec<Vec<f64>> = data.series.samples().map(|s| s.to_vec()).collect();
            write_text(out_dir, "state_measure.csv", &state_measure(&states, cfg.data.burn_in)?.to_csv(), &mut written)?;
        }
        let labels = cfg.param_labels();
        let mut summary = RunSummary {
            out_dir: out_dir.to_path_buf(),
            restarts: Vec::new(),
            baseline: Vec::new(),
            landscape: Vec::new(),
            report: json!({}),
        };
        if let Some(points) = &grid {
            summary.landscape = scan_landscape(&objective, points)?;
            write_text(out_dir, "landscape.csv", &landscape_csv(&labels, &summary.landscape), &mut written)?;
        }
        if let Mode::Run = mode {
            let opt = &cfg.optimizer;
            let restart_seed = rng::derive_seed(cfg.seed, 30);
            summary.restarts =
                multi_start(|x| objective.eval(x), &opt.bounds, opt.restarts, restart_seed, &opt.nelder_mead)?;
            let best = best_of(&summary.restarts).expect("at least one restart").clone();
            best.write_json(&out_dir.join("opt_result.json"))?;
            written.push("opt_result.json".into());
            write_json(out_dir, "restarts.json", &summary.restarts, &mut written)?;

            let same_family = cfg.data.generator.is_none();
            let mut report = json!({ "experiment": cfg.experiment.name(), "param_names": labels });
            if same_family {
                report["truth"] = json!(cfg.data.truth);
                report["identification"] = error_summary(&summary.restarts, &cfg.data.truth);
            }
            if let Some(b) = &baseline {
                summary.baseline = multi_start(|x| b.eval(x), &opt.bounds, opt.restarts, restart_seed, &opt.nelder_mead)?;
                write_json(out_dir, "baseline_restarts.json", &summary.baseline, &mut written)?;
                if same_family {
                    report["baseline"] = error_summary(&summary.baseline, &cfg.data.truth);
                }
            }
            match cfg.experiment {
                Experiment::Torus => report["distinguishability"] = torus_distinguishability(cfg)?,
                Experiment::Lorenz if data.full_state => {
                    report["invariance"] = invariance_report(cfg, &data.series, &best.theta_star)?
                }
                _ => {}
            }
            summary.report = report;
            write_json(out_dir, "report.json", &summary.report, &mut written)?;
        }

        let generator = cfg.generator();
        let mut meta = json!({
            "name": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "experiment": cfg.experiment.name(),
            "mode": match mode { Mode::Run => "run", Mode::Scan(_) => "scan" },
            "seed": cfg.seed,
            "model_integrator": cfg.model.integrator_label(),
            "data_integrator": generator.integrator_label(),
            "dt_samp": generator.dt_samp(),
            "tau": cfg.delay.tau(generator.dt_samp()),
            "metric": cfg.metric,
            "param_names": cfg.param_labels(),
            "config": cfg,
        });
        written.push("metadata.json".into());
        written.push("timing.json".into());
        meta["artifacts"] = json!(written);
        let mut text = serde_json::to_string_pretty(&meta)?;
        text.push('\n');
        std::fs::write(out_dir.join("metadata.json"), text)?;
        let timing = json!({ "wall_seconds": started.elapsed().as_secs_f64() });
        std::fs::write(out_dir.join("timing.json"), serde_json::to_string_pretty(&timing)? + "\n")?;
        Ok(summary)
    };
    run().map_err(runtime_err)
}

/// Reads the echoed config back from a run's `metadata.json`.
pub fn config_from_metadata(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|_| Error::MissingArtifact(path.display().to_string()))?;
    let meta: serde_json::Value = serde_json::from_str(&text)?;
    let cfg = meta.get("config").ok_or_else(|| Error::Config(format!("{}: no `config` entry", path.display())))?;
    RunConfig::from_json(&cfg.to_string())
}
