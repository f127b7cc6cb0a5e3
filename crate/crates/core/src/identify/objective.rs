//! Identification objectives.
//!
//! * `Alg1`: simulate a long trajectory of the candidate model, observe it,
//!   delay-embed it and compare with the observed delay measure.
//! * `Alg2` and variants: push sampled data states through the candidate
//!   map and compare state and delay-coordinate measures.
//! * `Pointwise`: mean squared mismatch of simulated and observed series,
//!   the baseline that chaos defeats.

use serde::{Deserialize, Serialize};

use super::{ModelFamily, ParamBox};
use crate::dynamics::DynamicalModel;
use crate::error::{Error, Result};
use crate::measure::{
    add_noise, delay_embed_ordered, pushforward, CoordOrder, DelayParams, EmpiricalMeasure, Observable, TimeSeries,
};
use crate::metrics::MetricSpec;
use crate::rng;

pub const DEFAULT_PENALTY: f64 = 1e6;
pub const DEFAULT_SAMPLES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    Alg1,
    Alg2,
    Alg2Unbiased,
    Alg2WithInit,
    /// First term of `Alg2` only: `D(T_theta # mu, mu)`.
    StateOnly,
    Pointwise,
}

impl ObjectiveKind {
    pub fn needs_full_state(self) -> bool {
        !matches!(self, ObjectiveKind::Alg1 | ObjectiveKind::Pointwise)
    }
}

fn default_penalty() -> f64 {
    DEFAULT_PENALTY
}
fn default_samples() -> usize {
    DEFAULT_SAMPLES
}
fn default_true() -> bool {
    true
}

/// Declarative description of an identification objective. The data it is
/// evaluated against is supplied separately to [`Objective::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub kind: ObjectiveKind,
    pub family: ModelFamily,
    pub bounds: ParamBox,
    pub metric: MetricSpec,
    pub delay: DelayParams,
    pub observables: Vec<Observable>,
    /// Model steps simulated by `Alg1` / `Pointwise`; defaults to the data
    /// horizon.
    #[serde(default)]
    pub sim_length: Option<usize>,
    /// Start state of `Alg1` / `Pointwise` simulations.
    #[serde(default)]
    pub initial_state: Option<Vec<f64>>,
    /// Std of Gaussian noise added to `initial_state` before `Alg1`
    /// simulations, so candidate runs start off the data orbit.
    #[serde(default)]
    pub initial_jitter: f64,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    /// Samples matched by the initial-condition term; defaults to `m`.
    #[serde(default)]
    pub init_window: Option<usize>,
    /// Compare `Alg2WithInit` against data pushforwards at the sampled
    /// states instead of independent samples.
    #[serde(default = "default_true")]
    pub unbiased_init: bool,
    #[serde(default = "default_penalty")]
    pub divergence_penalty: f64,
    #[serde(default)]
    pub seed: u64,
}

/// Term-by-term value of a pushforward objective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Breakdown {
    pub state: f64,
    pub delay: Vec<f64>,
    pub init: f64,
}

impl Breakdown {
    pub fn total(&self) -> f64 {
        self.state + self.delay.iter().sum::<f64>() + self.init
    }
}

struct InitWindow {
    x0: Vec<f64>,
    /// `targets[j][k] = y_j(x(t_{k tau_bar}))`
    targets: Vec<Vec<f64>>,
}

enum Prepared {
    Trajectory {
        data: TimeSeries,
        data_measure: EmpiricalMeasure,
        x0: Vec<f64>,
        sim_length: usize,
    },
    Pushforward {
        samples: EmpiricalMeasure,
        state_target: EmpiricalMeasure,
        delay_targets: Vec<EmpiricalMeasure>,
        init: Option<InitWindow>,
    },
}

/// An [`ObjectiveSpec`] bound to its data, with all data-side measures
/// precomputed.
pub struct Objective {
    spec: ObjectiveSpec,
    prepared: Prepared,
}

fn take(mu_flat: &[f64], dim: usize, idx: &[usize]) -> Result<EmpiricalMeasure> {
    EmpiricalMeasure::uniform_flat(dim, idx.iter().flat_map(|&i| mu_flat[i * dim..(i + 1) * dim].iter().copied()).collect())
}

impl Objective {
    pub fn new(spec: ObjectiveSpec, data: &TimeSeries) -> Result<Self> {
        spec.family.validate()?;
        spec.bounds.validate()?;
        spec.metric.validate()?;
        spec.delay.validate()?;
        if spec.bounds.dim() != spec.family.n_free() {
            return Err(Error::Config(format!(
                "bounds have {} entries but the family has {} free parameters",
                spec.bounds.dim(),
                spec.family.n_free()
            )));
        }
        if spec.observables.is_empty() {
            return Err(Error::Config("objective needs at least one observable".into()));
        }
        let state_dim = spec.family.state_dim();
        for obs in &spec.observables {
            obs.validate(state_dim)?;
        }
        if !(spec.divergence_penalty.is_finite() && spec.divergence_penalty > 0.0) {
            return Err(Error::Config("divergence_penalty must be finite and > 0".into()));
        }
        let prepared = if spec.kind.needs_full_state() {
            Self::prepare_pushforward(&spec, data)?
        } else {
            Self::prepare_trajectory(&spec, data)?
        };
        Ok(Self { spec, prepared })
    }

    fn prepare_trajectory(spec: &ObjectiveSpec, data: &TimeSeries) -> Result<Prepared> {
        if spec.observables.len() != 1 {
            return Err(Error::Config(format!("{:?} uses exactly one observable", spec.kind)));
        }
        if data.dim() != 1 {
            return Err(Error::Config(format!("{:?} needs a scalar observed series, got dim {}", spec.kind, data.dim())));
        }
        let x0 = spec
            .initial_state
            .clone()
            .ok_or_else(|| Error::Config(format!("{:?} needs model.initial_state", spec.kind)))?;
        crate::dynamics::check_state(spec.family.state_dim(), &x0)?;
        if !(spec.initial_jitter >= 0.0 && spec.initial_jitter.is_finite()) {
            return Err(Error::Config("initial_jitter must be finite and >= 0".into()));
        }
        let x0 = if spec.kind == ObjectiveKind::Alg1 && spec.initial_jitter > 0.0 {
            let jitter_seed = rng::derive_seed(spec.seed, 0x6a6974);
            let jittered = add_noise(&TimeSeries::scalar(x0, 1.0, 0.0)?, spec.initial_jitter, jitter_seed)?;
            jittered.flat().to_vec()
        } else {
            x0
        };
        let sim_length = spec.sim_length.unwrap_or(data.len() - 1);
        if spec.kind == ObjectiveKind::Pointwise && sim_length.min(data.len() - 1) == 0 {
            return Err(Error::Config("pointwise objective needs a horizon of at least one step".into()));
        }
        let data_measure = if spec.kind == ObjectiveKind::Alg1 {
            if spec.burn_in >= data.len() || spec.burn_in > sim_length {
                return Err(Error::Config(format!("burn_in {} leaves no samples", spec.burn_in)));
            }
            let kept = data.slice(spec.burn_in, data.len())?;
            spec.delay.point_count(sim_length + 1 - spec.burn_in)?;
            delay_embed_ordered(&kept, spec.delay, CoordOrder::Ascending)?
        } else {
            EmpiricalMeasure::point_mass(vec![0.0])?
        };
        Ok(Prepared::Trajectory { data: data.clone(), data_measure, x0, sim_length })
    }

    fn prepare_pushforward(spec: &ObjectiveSpec, data: &TimeSeries) -> Result<Prepared> {
        let n = spec.family.state_dim();
        if data.dim() != n {
            return Err(Error::Config(format!("{:?} needs full-state data of dim {n}, got {}", spec.kind, data.dim())));
        }
        if spec.burn_in >= data.len() {
            return Err(Error::Config(format!("burn_in {} >= data length {}", spec.burn_in, data.len())));
        }
        let states = &data.flat()[spec.burn_in * n..];
        let len = states.len() / n;
        let m = spec.delay.m;
        let tb = spec.delay.tau_bar;
        let ahead = spec.delay.window().max(tb);
        if len <= ahead || spec.n_samples == 0 || spec.n_samples > len - ahead {
            return Err(Error::Config(format!(
                "need n_samples in 1..={} for {len} post-burn-in states, got {}",
                len.saturating_sub(ahead),
                spec.n_samples
            )));
        }
        let idx = crate::measure::subsample_indices(len - ahead, spec.n_samples, rng::derive_seed(spec.seed, 1))?;
        let samples = take(states, n, &idx)?;
        let unbiased = match spec.kind {
            ObjectiveKind::Alg2Unbiased => true,
            ObjectiveKind::Alg2WithInit => spec.unbiased_init,
            _ => false,
        };
        let y = |j: usize, i: usize| spec.observables[j].eval(&states[i * n..(i + 1) * n]);

        let state_target = if unbiased {
            let shifted: Vec<usize> = idx.iter().map(|&i| i + tb).collect();
            take(states, n, &shifted)?
        } else {
            samples.clone()
        };

        let mut delay_targets = Vec::with_capacity(spec.observables.len());
        for j in 0..spec.observables.len() {
            let target = if unbiased {
                let pts = idx.iter().flat_map(|&i| (0..m).map(move |k| (i, k))).map(|(i, k)| y(j, i + k * tb)).collect();
                EmpiricalMeasure::uniform_flat(m, pts)?
            } else {
                let series = TimeSeries::scalar((0..len).map(|i| y(j, i)).collect(), data.dt_samp, 0.0)?;
                let full = delay_embed_ordered(&series, spec.delay, CoordOrder::Ascending)?;
                let k = spec.n_samples.min(full.len());
                crate::measure::subsample(&full, k, rng::derive_seed(spec.seed, 2 + j as u64))?
            };
            delay_targets.push(target);
        }

        let init = if spec.kind == ObjectiveKind::Alg2WithInit {
            let w = spec.init_window.unwrap_or(m);
            if w == 0 || (w - 1) * tb >= len {
                return Err(Error::Config(format!("init_window {w} exceeds the data length")));
            }
            let targets = (0..spec.observables.len()).map(|j| (0..w).map(|k| y(j, k * tb)).collect()).collect();
            Some(InitWindow { x0: states[..n].to_vec(), targets })
        } else {
            None
        };
        Ok(Prepared::Pushforward { samples, state_target, delay_targets, init })
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    /// The sampled data measure `mu` used by pushforward objectives.
    pub fn samples(&self) -> Option<&EmpiricalMeasure> {
        match &self.prepared {
            Prepared::Pushforward { samples, .. } => Some(samples),
            Prepared::Trajectory { .. } => None,
        }
    }

    /// Observed delay measure used by `Alg1`.
    pub fn data_measure(&self) -> Option<&EmpiricalMeasure> {
        match &self.prepared {
            Prepared::Trajectory { data_measure, .. } if self.spec.kind == ObjectiveKind::Alg1 => Some(data_measure),
            _ => None,
        }
    }

    fn penalty_for(&self, err: &Error) -> f64 {
        self.spec.divergence_penalty + overflow_magnitude(err)
    }

    /// Objective value at `theta`. Divergent candidates return the penalty;
    /// only domain and shape errors are reported as `Err`.
    pub fn eval(&self, theta: &[f64]) -> Result<f64> {
        self.spec.bounds.check(theta)?;
        let model = self.spec.family.build(theta)?;
        let value = match &self.prepared {
            Prepared::Trajectory { data, data_measure, x0, sim_length } => match self.spec.kind {
                ObjectiveKind::Alg1 => self.alg1(model.as_ref(), data_measure, x0, *sim_length),
                _ => self.pointwise(model.as_ref(), data, x0, *sim_length),
            },
            Prepared::Pushforward { .. } => self.breakdown_with(model.as_ref()).map(|b| b.total()),
        };
        match value {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Ok(self.spec.divergence_penalty),
            Err(e) if e.is_divergence() => Ok(self.penalty_for(&e)),
            Err(e) => Err(e),
        }
    }

    /// Per-term values of a pushforward objective.
    pub fn breakdown(&self, theta: &[f64]) -> Result<Breakdown> {
        self.spec.bounds.check(theta)?;
        let model = self.spec.family.build(theta)?;
        self.breakdown_with(model.as_ref())
    }

    fn alg1(&self, model: &dyn DynamicalModel, data_measure: &EmpiricalMeasure, x0: &[f64], n: usize) -> Result<f64> {
        let y = observe_run(model, &self.spec.observables[0], x0, n)?;
        let series = TimeSeries::scalar(y[self.spec.burn_in..].to_vec(), 1.0, 0.0)?;
        let mu = delay_embed_ordered(&series, self.spec.delay, CoordOrder::Ascending)?;
        self.spec.metric.distance(&mu, data_measure)
    }

    fn pointwise(&self, model: &dyn DynamicalModel, data: &TimeSeries, x0: &[f64], n: usize) -> Result<f64> {
        let horizon = n.min(data.len() - 1);
        if horizon == 0 {
            return Err(Error::InvalidParameter("pointwise objective needs a nonzero horizon".into()));
        }
        let y = observe_run(model, &self.spec.observables[0], x0, horizon)?;
        let obs = data.flat();
        let sse: f64 = (1..=horizon).map(|i| (y[i] - obs[i]).powi(2)).sum();
        Ok(sse / horizon as f64)
    }

    fn breakdown_with(&self, model: &dyn DynamicalModel) -> Result<Breakdown> {
        let Prepared::Pushforward { samples, state_target, delay_targets, init } = &self.prepared else {
            return Err(Error::InvalidParameter(format!("{:?} has no term breakdown", self.spec.kind)));
        };
        let n = model.state_dim();
        let m = self.spec.delay.m;
        let tb = self.spec.delay.tau_bar;
        let obs = &self.spec.observables;
        let need_delay = self.spec.kind != ObjectiveKind::StateOnly;
        let iterations = if need_delay { (m - 1).max(1) } else { 1 };

        // Each sample maps to [T x, y_1 orbit (m values), ..., y_l orbit].
        let width = n + if need_delay { obs.len() * m } else { 0 };
        let orbits = pushforward(samples, |x| {
            let mut out = vec![0.0; width];
            let mut ys = vec![0.0; obs.len() * m];
            for (j, o) in obs.iter().enumerate() {
                ys[j * m] = o.eval(x);
            }
            let mut cur = x.to_vec();
            for k in 1..=iterations {
                for _ in 0..tb {
                    cur = model.advance(&cur)?;
                }
                if k == 1 {
                    out[..n].copy_from_slice(&cur);
                }
                if need_delay && k < m {
                    for (j, o) in obs.iter().enumerate() {
                        ys[j * m + k] = o.eval(&cur);
                    }
                }
            }
            if need_delay {
                out[n..].copy_from_slice(&ys);
            }
            Ok(out)
        })?;

        let pushed_state = orbits.project(&(0..n).collect::<Vec<_>>())?;
        let state = self.spec.metric.distance(&pushed_state, state_target)?;
        let mut delay = Vec::new();
        if need_delay {
            for (j, target) in delay_targets.iter().enumerate() {
                let cols: Vec<usize> = (n + j * m..n + (j + 1) * m).collect();
                delay.push(self.spec.metric.distance(&orbits.project(&cols)?, target)?);
            }
        }
        let init = match init {
            Some(w) => self.init_term(model, w)?,
            None => 0.0,
        };
        Ok(Breakdown { state, delay, init })
    }

    /// `(1 / (l W)) sum_j sum_k |y_j(T_theta^k x0) - y_j(x(t_k))|^2`.
    fn init_term(&self, model: &dyn DynamicalModel, w: &InitWindow) -> Result<f64> {
        let obs = &self.spec.observables;
        let len = w.targets[0].len();
        let mut cur = w.x0.clone();
        let mut total = 0.0;
        for k in 0..len {
            if k > 0 {
                for _ in 0..self.spec.delay.tau_bar {
                    cur = model.advance(&cur)?;
                }
            }
            for (j, o) in obs.iter().enumerate() {
                total += (o.eval(&cur) - w.targets[j][k]).powi(2);
            }
        }
        Ok(total / (obs.len() * len) as f64)
    }
}

/// Observes `n + 1` states of a model run without storing the states.
pub fn observe_run(model: &dyn DynamicalModel, obs: &Observable, x0: &[f64], n: usize) -> Result<Vec<f64>> {
    crate::dynamics::check_state(model.state_dim(), x0)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = x0.to_vec();
    out.push(obs.eval(&cur));
    for step in 0..n {
        cur = model.advance(&cur).map_err(|e| match e {
            Error::Divergence { norm, guard, .. } => Error::Divergence { step: step + 1, norm, guard },
            other => other,
        })?;
        out.push(obs.eval(&cur));
    }
    Ok(out)
}

/// `log10` of the state norm that tripped the overflow guard; unstable
/// spectral solves count as the largest finite magnitude.
fn overflow_magnitude(err: &Error) -> f64 {
    match err {
        Error::Divergence { norm, guard, .. } => {
            let v = norm.max(*guard);
            if v.is_finite() {
                v.log10()
            } else {
                f64::MAX.log10()
            }
        }
        Error::AtPoint { source, .. } => overflow_magnitude(source),
        _ => f64::MAX.log10(),
    }
}

/// Evaluates the pointwise baseline for a single-observable spec.
pub fn pointwise_objective(theta: &[f64], spec: &ObjectiveSpec, data: &TimeSeries) -> Result<f64> {
    let spec = ObjectiveSpec { kind: ObjectiveKind::Pointwise, ..spec.clone() };
    Objective::new(spec, data)?.eval(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, FlowIntegrator, Lorenz63Field, Method};
    use crate::identify::{self_distance_floor, scan_landscape};

    fn lorenz_family() -> ModelFamily {
        ModelFamily::lorenz(Lorenz63Field::default(), 1.0, FlowIntegrator::new(Method::Euler, 0.01, 1), vec![3])
    }

    fn lorenz_data(n: usize) -> TimeSeries {
        let model = lorenz_family().build(&[1.0]).unwrap();
        let traj = simulate(model.as_ref(), &[1.0, 1.0, 1.0], n).unwrap();
        TimeSeries::new(traj, 0.01, 0.0).unwrap()
    }

    fn lorenz_spec(kind: ObjectiveKind) -> ObjectiveSpec {
        ObjectiveSpec {
            kind,
            family: lorenz_family(),
            bounds: ParamBox::new(vec![0.0], vec![2.0]).unwrap(),
            metric: MetricSpec::energy_mmd(),
            delay: DelayParams::new(3, 20).unwrap(),
            observables: vec![Observable::coordinate(0)],
            sim_length: None,
            initial_state: None,
            initial_jitter: 0.0,
            burn_in: 1000,
            n_samples: 300,
            init_window: None,
            unbiased_init: true,
            divergence_penalty: DEFAULT_PENALTY,
            seed: 3,
        }
    }

    fn torus_spec(kind: ObjectiveKind, data: &TimeSeries) -> (ObjectiveSpec, TimeSeries) {
        let spec = ObjectiveSpec {
            kind,
            family: ModelFamily::torus(0.3, 0.6),
            bounds: ParamBox::new(vec![0.0, 0.0], vec![0.999, 0.999]).unwrap(),
            metric: MetricSpec::energy_mmd(),
            delay: DelayParams::new(3, 1).unwrap(),
            observables: vec![Observable::coordinate(0)],
            sim_length: None,
            initial_state: Some(vec![0.1, 0.2]),
            initial_jitter: 0.0,
            burn_in: 0,
            n_samples: 50,
            init_window: None,
            unbiased_init: true,
            divergence_penalty: DEFAULT_PENALTY,
            seed: 0,
        };
        (spec, data.clone())
    }

    fn torus_data(alpha: f64, beta: f64, n: usize) -> TimeSeries {
        let model = ModelFamily::torus(alpha, beta).build(&[alpha, beta]).unwrap();
        TimeSeries::new(simulate(model.as_ref(), &[0.1, 0.2], n).unwrap(), 1.0, 0.0).unwrap()
    }

    #[test]
    fn divergent_candidate_gets_finite_penalty() {
        let data = lorenz_data(3000);
        let mut spec = lorenz_spec(ObjectiveKind::Alg2);
        spec.bounds = ParamBox::new(vec![0.0], vec![100.0]).unwrap();
        let obj = Objective::new(spec, &data).unwrap();
        let v = obj.eval(&[60.0]).unwrap();
        assert!(v.is_finite() && v >= DEFAULT_PENALTY, "{v}");
        assert!(matches!(obj.eval(&[101.0]), Err(Error::OutsideBox { .. })));
    }

    #[test]
    fn evaluation_is_deterministic() {
        let data = lorenz_data(3000);
        let a = Objective::new(lorenz_spec(ObjectiveKind::Alg2Unbiased), &data).unwrap();
        let b = Objective::new(lorenz_spec(ObjectiveKind::Alg2Unbiased), &data).unwrap();
        assert_eq!(a.eval(&[0.9]).unwrap().to_bits(), b.eval(&[0.9]).unwrap().to_bits());
        assert_eq!(a.eval(&[0.9]).unwrap().to_bits(), a.eval(&[0.9]).unwrap().to_bits());
    }

    #[test]
    fn truth_below_floor_and_identity_above() {
        let data = lorenz_data(21000);
        let obj = Objective::new(lorenz_spec(ObjectiveKind::Alg2), &data).unwrap();
        let states = crate::measure::state_measure(&data.samples().map(|s| s.to_vec()).collect::<Vec<_>>(), 1000).unwrap();
        let floor = self_distance_floor(&states, 300, &MetricSpec::energy_mmd(), 11).unwrap();
        let truth = obj.breakdown(&[1.0]).unwrap();
        assert!(truth.state < floor, "{truth:?} floor {floor}");
        let ident = obj.breakdown(&[0.0]).unwrap();
        assert_eq!(ident.state, 0.0);
        assert!(ident.total() > floor && ident.total() > truth.total(), "{ident:?} floor {floor}");
    }

    #[test]
    fn init_term_vanishes_for_the_generator() {
        let data = torus_data(0.3, 0.6, 400);
        let (mut spec, data) = torus_spec(ObjectiveKind::Alg2WithInit, &data);
        spec.observables.push(Observable::Linear { weights: vec![1.0, 1.0] });
        let obj = Objective::new(spec, &data).unwrap();
        assert_eq!(obj.breakdown(&[0.3, 0.6]).unwrap().init, 0.0);
        assert!(obj.breakdown(&[0.31, 0.6]).unwrap().init > 0.0);
    }

    #[test]
    fn singleton_scan_matches_direct_call() {
        let data = torus_data(0.3, 0.6, 400);
        let (spec, data) = torus_spec(ObjectiveKind::Alg2Unbiased, &data);
        let obj = Objective::new(spec, &data).unwrap();
        let rows = scan_landscape(&obj, &[vec![0.35, 0.5]]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].loss.to_bits(), obj.eval(&[0.35, 0.5]).unwrap().to_bits());
    }

    #[test]
    fn trajectory_objectives_vanish_at_the_generator() {
        let full = torus_data(0.3, 0.6, 300);
        let y = crate::measure::observe(
            &full.samples().map(|s| s.to_vec()).collect::<Vec<_>>(),
            &Observable::coordinate(0),
            1.0,
        )
        .unwrap();
        let (spec, y) = torus_spec(ObjectiveKind::Alg1, &y);
        let obj = Objective::new(spec.clone(), &y).unwrap();
        assert_eq!(obj.eval(&[0.3, 0.6]).unwrap(), 0.0);
        assert!(obj.eval(&[0.4, 0.6]).unwrap() > 0.0);
        assert_eq!(pointwise_objective(&[0.3, 0.6], &spec, &y).unwrap(), 0.0);
        assert!(pointwise_objective(&[0.31, 0.6], &spec, &y).unwrap() > 0.0);
    }

    #[test]
    fn zero_horizon_is_rejected() {
        let y = TimeSeries::scalar(vec![0.1], 1.0, 0.0).unwrap();
        let (spec, y) = torus_spec(ObjectiveKind::Pointwise, &y);
        assert!(pointwise_objective(&[0.3, 0.6], &spec, &y).is_err());
        let spec = ObjectiveSpec { sim_length: Some(0), ..spec };
        let y2 = TimeSeries::scalar(vec![0.1, 0.4], 1.0, 0.0).unwrap();
        assert!(pointwise_objective(&[0.3, 0.6], &spec, &y2).is_err());
    }

    #[test]
    fn spec_validation() {
        let data = lorenz_data(3000);
        let mut spec = lorenz_spec(ObjectiveKind::Alg2);
        spec.observables.clear();
        assert!(matches!(Objective::new(spec, &data), Err(Error::Config(_))));
        let mut spec = lorenz_spec(ObjectiveKind::Alg2);
        spec.n_samples = 10_000;
        assert!(Objective::new(spec, &data).is_err());
        let spec = lorenz_spec(ObjectiveKind::Alg1);
        assert!(Objective::new(spec, &data).is_err());
    }
}
