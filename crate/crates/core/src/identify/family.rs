use serde::{Deserialize, Serialize};

use crate::dynamics::{DynamicalModel, FlowIntegrator, KsConfig, KsModel, Lorenz63, Lorenz63Field, Method, TorusRotation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// Parameters `[alpha, beta]`.
    Torus,
    /// Parameters `[sigma, rho, beta, time_scale]`; one model step is
    /// `integrator.n_sub * integrator.dt_int` time units.
    Lorenz { integrator: FlowIntegrator },
    /// Parameters `[theta]`.
    Ks {
        #[serde(default = "default_ks_domain")]
        domain_length: f64,
        #[serde(default = "default_ks_grid")]
        grid_points: usize,
        #[serde(default = "default_ks_dt")]
        dt: f64,
        #[serde(default = "default_ks_sub")]
        n_sub: usize,
    },
}

fn default_ks_domain() -> f64 {
    KsConfig::default().domain_length
}
fn default_ks_grid() -> usize {
    KsConfig::default().grid_points
}
fn default_ks_dt() -> f64 {
    KsConfig::default().dt
}
fn default_ks_sub() -> usize {
    KsConfig::default().n_sub
}

/// A parameterized model constructor `theta -> T_theta`.
///
/// `base` holds the full parameter vector; the entries listed in `free` are
/// replaced by the optimization variable, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFamily {
    #[serde(flatten)]
    pub kind: FamilyKind,
    pub base: Vec<f64>,
    pub free: Vec<usize>,
}

impl ModelFamily {
    pub fn torus(alpha: f64, beta: f64) -> Self {
        Self { kind: FamilyKind::Torus, base: vec![alpha, beta], free: vec![0, 1] }
    }

    pub fn lorenz(field: Lorenz63Field, time_scale: f64, integrator: FlowIntegrator, free: Vec<usize>) -> Self {
        Self {
            kind: FamilyKind::Lorenz { integrator },
            base: vec![field.sigma, field.rho, field.beta, time_scale],
            free,
        }
    }

    pub fn ks(cfg: KsConfig) -> Self {
        Self {
            kind: FamilyKind::Ks {
                domain_length: cfg.domain_length,
                grid_points: cfg.grid_points,
                dt: cfg.dt,
                n_sub: cfg.n_sub,
            },
            base: vec![cfg.theta],
            free: vec![0],
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self.kind {
            FamilyKind::Torus => &["alpha", "beta"],
            FamilyKind::Lorenz { .. } => &["sigma", "rho", "beta", "time_scale"],
            FamilyKind::Ks { .. } => &["theta"],
        }
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    /// Free parameters of the base vector.
    pub fn base_free(&self) -> Vec<f64> {
        self.free.iter().map(|&i| self.base[i]).collect()
    }

    pub fn state_dim(&self) -> usize {
        match self.kind {
            FamilyKind::Torus => 2,
            FamilyKind::Lorenz { .. } => 3,
            FamilyKind::Ks { grid_points, .. } => grid_points,
        }
    }

    /// Time units advanced by one model step.
    pub fn dt_samp(&self) -> f64 {
        match &self.kind {
            FamilyKind::Torus => 1.0,
            FamilyKind::Lorenz { integrator } => integrator.dt_int * integrator.n_sub as f64,
            FamilyKind::Ks { dt, n_sub, .. } => dt * *n_sub as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.param_names().len();
        if self.base.len() != n {
            return Err(Error::Config(format!("model.base needs {n} entries {:?}, got {}", self.param_names(), self.base.len())));
        }
        let mut seen = vec![false; n];
        for &i in &self.free {
            if i >= n || seen[i] {
                return Err(Error::Config(format!("model.free index {i} invalid or repeated")));
            }
            seen[i] = true;
        }
        self.build_full(&self.base).map(|_| ()).map_err(|e| Error::Config(format!("model: {e}")))
    }

    fn full_params(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.free.len() {
            return Err(Error::DimensionMismatch { expected: self.free.len(), got: theta.len() });
        }
        let mut full = self.base.clone();
        for (&i, &v) in self.free.iter().zip(theta) {
            full[i] = v;
        }
        Ok(full)
    }

    pub fn build(&self, theta: &[f64]) -> Result<Box<dyn DynamicalModel>> {
        let full = self.full_params(theta)?;
        self.build_full(&full)
    }

    fn build_full(&self, p: &[f64]) -> Result<Box<dyn DynamicalModel>> {
        Ok(match &self.kind {
            FamilyKind::Torus => Box::new(TorusRotation::new(p[0], p[1])?),
            FamilyKind::Lorenz { integrator } => {
                Box::new(Lorenz63::new(Lorenz63Field::new(p[0], p[1], p[2]), p[3], *integrator)?)
            }
            FamilyKind::Ks { domain_length, grid_points, dt, n_sub } => Box::new(KsModel::new(KsConfig {
                theta: p[0],
                domain_length: *domain_length,
                grid_points: *grid_points,
                dt: *dt,
                n_sub: *n_sub,
            })?),
        })
    }

    /// Integrator name recorded in run metadata.
    pub fn integrator_label(&self) -> String {
        match &self.kind {
            FamilyKind::Torus => "exact".into(),
            FamilyKind::Lorenz { integrator } => match integrator.method {
                Method::Euler => format!("euler(dt={})", integrator.dt_int),
                Method::Rk4 => format!("rk4(dt={})", integrator.dt_int),
            },
            FamilyKind::Ks { dt, .. } => format!("etdrk4(dt={dt})"),
        }
    }
}

/// Box constraint on the free parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ParamBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = Self { lo, hi };
        b.validate()?;
        Ok(b)
    }

    /// Unbounded box of dimension `n`.
    pub fn unbounded(n: usize) -> Self {
        Self { lo: vec![f64::NEG_INFINITY; n], hi: vec![f64::INFINITY; n] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.len() != self.hi.len() || self.lo.is_empty() {
            return Err(Error::InvalidParameter("box bounds need matching, nonempty lo/hi".into()));
        }
        if self.lo.iter().zip(&self.hi).any(|(l, h)| !(l < h) || l.is_nan() || h.is_nan()) {
            return Err(Error::InvalidParameter(format!("box needs lo < hi, got {:?} / {:?}", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        for (index, (&value, (&lo, &hi))) in x.iter().zip(self.lo.iter().zip(&self.hi)).enumerate() {
            if !(lo <= value && value <= hi) {
                return Err(Error::OutsideBox { index, value, lo, hi });
            }
        }
        Ok(())
    }

    pub fn project(&self, x: &mut [f64]) {
        for (v, (l, h)) in x.iter_mut().zip(self.lo.iter().zip(&self.hi)) {
            *v = v.clamp(*l, *h);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.iter().chain(&self.hi).all(|v| v.is_finite())
    }
}
