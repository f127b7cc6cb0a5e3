//! Run configuration: one JSON document fully describes an experiment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{DynamicalModel, KsModel};
use crate::error::{Error, Result};
use crate::identify::{
    FamilyKind, ModelFamily, NelderMeadOptions, ObjectiveKind, ObjectiveSpec, ParamBox, DEFAULT_PENALTY,
    DEFAULT_SAMPLES,
};
use crate::measure::{DelayParams, Observable};
use crate::metrics::MetricSpec;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Torus,
    Lorenz,
    Ks,
    Custom,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Torus => "torus",
            Experiment::Lorenz => "lorenz",
            Experiment::Ks => "ks",
            Experiment::Custom => "custom",
        }
    }
}

/// How the first state of a simulation is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    Values { values: Vec<f64> },
    /// `amplitude * sin(2 pi periods x / L)` on a KS grid.
    Sine { amplitude: f64, periods: f64 },
}

impl InitialState {
    pub fn build(&self, family: &ModelFamily) -> Result<Vec<f64>> {
        let x = match self {
            InitialState::Values { values } => values.clone(),
            InitialState::Sine { amplitude, periods } => match &family.kind {
                FamilyKind::Ks { domain_length, grid_points, dt, n_sub } => {
                    let model = KsModel::new(crate::dynamics::KsConfig {
                        theta: 1.0,
                        domain_length: *domain_length,
                        grid_points: *grid_points,
                        dt: *dt,
                        n_sub: *n_sub,
                    })?;
                    let k = 2.0 * std::f64::consts::PI * periods / domain_length;
                    model.field_from(|x| amplitude * (k * x).sin())
                }
                _ => return Err(Error::Config("initial_state.kind = sine needs a ks model".into())),
            },
        };
        if x.len() != family.state_dim() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!(
                "initial_state must have {} finite entries, got {}",
                family.state_dim(),
                x.len()
            )));
        }
        Ok(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// Model that generates the data; defaults to the identification family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<ModelFamily>,
    /// Free-parameter values of the data-generating model.
    pub truth: Vec<f64>,
    pub initial_state: InitialState,
    /// Number of sampling steps; the series has `horizon + 1` samples.
    pub horizon: usize,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default)]
    pub noise_sigma: f64,
    pub observables: Vec<Observable>,
}

fn default_restarts() -> usize {
    1
}
fn default_samples() -> usize {
    DEFAULT_SAMPLES
}
fn default_penalty() -> f64 {
    DEFAULT_PENALTY
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub objective: ObjectiveKind,
    pub bounds: ParamBox,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub nelder_mead: NelderMeadOptions,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_window: Option<usize>,
    #[serde(default = "default_true")]
    pub unbiased_init: bool,
    /// Start state of candidate simulations; defaults to the data's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_initial_state: Option<InitialState>,
    #[serde(default)]
    pub initial_jitter: f64,
    #[serde(default = "default_penalty")]
    pub divergence_penalty: f64,
    /// Also run the pointwise baseline from the same starts.
    #[serde(default)]
    pub compare_pointwise: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl std::str::FromStr for GridAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("grid `{s}` is not start:stop:step"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        let axis = GridAxis { start: v[0], stop: v[1], step: v[2] };
        axis.values()?;
        Ok(axis)
    }
}

impl GridAxis {
    pub fn values(&self) -> Result<Vec<f64>> {
        crate::identify::grid_1d(self.start, self.stop, self.step).map_err(|e| Error::Config(format!("landscape grid: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandscapeConfig {
    /// One axis per free parameter.
    pub grid: Vec<GridAxis>,
}

/// Pairs of rotations compared in state and delay coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusReportConfig {
    pub pairs: Vec<[f64; 2]>,
    pub n_points: usize,
    #[serde(default = "default_delay_m")]
    pub m: usize,
    pub initial_state: [f64; 2],
}

fn default_delay_m() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelFamily,
    pub data: DataConfig,
    pub delay: DelayParams,
    pub metric: MetricSpec,
    pub optimizer: OptimizerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landscape: Option<LandscapeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus: Option<TorusReportConfig>,
    /// Output directory; not echoed so artifacts do not depend on it.
    #[serde(default, skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

fn field<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{name}: {msg}")),
        other => Error::Config(format!("{name}: {other}")),
    })
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::Config("config is empty".into()));
        }
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        // A run's metadata.json carries the config under `config`.
        let value = match value {
            serde_json::Value::Object(mut map) if map.get("config").is_some_and(|c| c.is_object()) => {
                map.remove("config").unwrap_or_default()
            }
            other => other,
        };
        let cfg: RunConfig = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn generator(&self) -> &ModelFamily {
        self.data.generator.as_ref().unwrap_or(&self.model)
    }

    /// Checks everything that can be checked without generating data.
    pub fn validate(&self) -> Result<()> {
        field("model", self.model.validate())?;
        let expected = match self.experiment {
            Experiment::Torus => Some("torus"),
            Experiment::Lorenz => Some("lorenz"),
            Experiment::Ks => Some("ks"),
            Experiment::Custom => None,
        };
        let kind_name = match self.model.kind {
            FamilyKind::Torus => "torus",
            FamilyKind::Lorenz { .. } => "lorenz",
            FamilyKind::Ks { .. } => "ks",
        };
        if let Some(e) = expected {
            if e != kind_name {
                return Err(Error::Config(format!("model.kind: experiment {e} needs a {e} model, got {kind_name}")));
            }
        }
        let generator = self.generator();
        field("data.generator", generator.validate())?;
        if generator.state_dim() != self.model.state_dim() {
            return Err(Error::Config("data.generator: state dimension differs from model".into()));
        }
        if self.data.truth.len() != generator.n_free() {
            return Err(Error::Config(format!(
                "data.truth: expected {} values, got {}",
                generator.n_free(),
                self.data.truth.len()
            )));
        }
        field("data.truth", generator.build(&self.data.truth).map(|_| ()))?;
        field("data.initial_state", self.data.initial_state.build(generator).map(|_| ()))?;
        if self.data.horizon == 0 {
            return Err(Error::Config("data.horizon must be >= 1".into()));
        }
        if self.data.burn_in >= self.data.horizon {
            return Err(Error::Config("data.burn_in must be smaller than data.horizon".into()));
        }
        if !(self.data.noise_sigma >= 0.0 && self.data.noise_sigma.is_finite()) {
            return Err(Error::Config("data.noise_sigma must be finite and >= 0".into()));
        }
        if self.data.observables.is_empty() {
            return Err(Error::Config("data.observables must not be empty".into()));
        }
        for (i, o) in self.data.observables.iter().enumerate() {
            field(&format!("data.observables[{i}]"), o.validate(self.model.state_dim()))?;
        }
        field("delay", self.delay.validate())?;
        field("delay", self.delay.point_count(self.data.horizon + 1 - self.data.burn_in).map(|_| ()))?;
        field("metric", self.metric.validate())?;

        let opt = &self.optimizer;
        field("optimizer.bounds", opt.bounds.validate())?;
        if opt.bounds.dim() != self.model.n_free() {
            return Err(Error::Config(format!(
                "optimizer.bounds: expected {} entries, got {}",
                self.model.n_free(),
                opt.bounds.dim()
            )));
        }
        if !opt.bounds.is_finite() {
            return Err(Error::Config("optimizer.bounds must be finite for random starts".into()));
        }
        if opt.restarts == 0 {
            return Err(Error::Config("optimizer.restarts must be >= 1".into()));
        }
        let nm = &opt.nelder_mead;
        if nm.max_iter == 0 || !(nm.initial_step > 0.0) || !(nm.x_tol >= 0.0) || !(nm.f_tol >= 0.0) {
            return Err(Error::Config("optimizer.nelder_mead: max_iter >= 1, initial_step > 0, tolerances >= 0".into()));
        }
        if !opt.objective.needs_full_state() && self.data.observables.len() != 1 {
            return Err(Error::Config(format!("optimizer.objective: {:?} uses exactly one observable", opt.objective)));
        }
        if let Some(s) = &opt.model_initial_state {
            field("optimizer.model_initial_state", s.build(&self.model).map(|_| ()))?;
        }
        if let Some(l) = &self.landscape {
            if l.grid.len() != self.model.n_free() {
                return Err(Error::Config(format!(
                    "landscape.grid: expected {} axes, got {}",
                    self.model.n_free(),
                    l.grid.len()
                )));
            }
            for a in &l.grid {
                a.values()?;
            }
        }
        if let Some(t) = &self.torus {
            if t.pairs.len() < 2 || t.n_points == 0 || t.m == 0 {
                return Err(Error::Config("torus: need >= 2 pairs, n_points >= 1, m >= 1".into()));
            }
            for p in &t.pairs {
                field("torus.pairs", crate::dynamics::TorusRotation::new(p[0], p[1]).map(|_| ()))?;
            }
        } else if self.experiment == Experiment::Torus {
            return Err(Error::Config("torus: block required for the torus experiment".into()));
        }
        Ok(())
    }

    /// Objective spec with the run seed applied.
    pub fn objective_spec(&self, kind: ObjectiveKind) -> Result<ObjectiveSpec> {
        let opt = &self.optimizer;
        let initial_state = match (&opt.model_initial_state, kind.needs_full_state()) {
            (_, true) => None,
            (Some(s), false) => Some(s.build(&self.model)?),
            (None, false) => Some(self.data.initial_state.build(self.generator())?),
        };
        Ok(ObjectiveSpec {
            kind,
            family: self.model.clone(),
            bounds: opt.bounds.clone(),
            metric: self.metric,
            delay: self.delay,
            observables: self.data.observables.clone(),
            sim_length: opt.sim_length,
            initial_state,
            initial_jitter: opt.initial_jitter,
            burn_in: self.data.burn_in,
            n_samples: opt.n_samples,
            init_window: opt.init_window,
            unbiased_init: opt.unbiased_init,
            divergence_penalty: opt.divergence_penalty,
            seed: rng::derive_seed(self.seed, 20),
        })
    }

    pub fn param_labels(&self) -> Vec<String> {
        let names = self.model.param_names();
        self.model.free.iter().map(|&i| names[i].to_string()).collect()
    }

    pub fn build_generator(&self) -> Result<Box<dyn DynamicalModel>> {
        self.generator().build(&self.data.truth)
    }
}
