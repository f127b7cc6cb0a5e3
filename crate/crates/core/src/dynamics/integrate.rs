use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_OVERFLOW_GUARD: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Euler,
    Rk4,
}

/// Fixed-step explicit integration over `n_sub` substeps of `dt_int`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowIntegrator {
    pub method: Method,
    pub dt_int: f64,
    pub n_sub: usize,
    #[serde(default = "default_guard")]
    pub guard: f64,
}

fn default_guard() -> f64 {
    DEFAULT_OVERFLOW_GUARD
}

impl FlowIntegrator {
    pub fn new(method: Method, dt_int: f64, n_sub: usize) -> Self {
        Self { method, dt_int, n_sub, guard: DEFAULT_OVERFLOW_GUARD }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_int > 0.0) || !self.dt_int.is_finite() {
            return Err(Error::InvalidParameter(format!("dt_int must be > 0, got {}", self.dt_int)));
        }
        if self.n_sub == 0 {
            return Err(Error::InvalidParameter("n_sub must be >= 1".into()));
        }
        Ok(())
    }

    pub fn run<F>(&self, field: F, x0: &[f64]) -> Result<Vec<f64>>
    where
        F: Fn(&[f64], &mut [f64]),
    {
        integrate_guarded(field, x0, self.dt_int, self.n_sub, self.method, self.guard)
    }
}

/// Integrates `x' = field(x)` with the default overflow guard.
pub fn integrate_flow<F>(field: F, x0: &[f64], dt_int: f64, n_sub: usize, method: Method) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    FlowIntegrator::new(method, dt_int, n_sub).validate()?;
    integrate_guarded(field, x0, dt_int, n_sub, method, DEFAULT_OVERFLOW_GUARD)
}

fn integrate_guarded<F>(field: F, x0: &[f64], dt: f64, n_sub: usize, method: Method, guard: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    for step in 0..n_sub {
        match method {
            Method::Euler => {
                field(&x, &mut k1);
                for i in 0..n {
                    x[i] += dt * k1[i];
                }
            }
            Method::Rk4 => {
                field(&x, &mut k1);
                for i in 0..n {
                    tmp[i] = x[i] + 0.5 * dt * k1[i];
                }
                field(&tmp, &mut k2);
                for i in 0..n {
                    tmp[i] = x[i] + 0.5 * dt * k2[i];
                }
                field(&tmp, &mut k3);
                for i in 0..n {
                    tmp[i] = x[i] + dt * k3[i];
                }
                field(&tmp, &mut k4);
                for i in 0..n {
                    x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
            }
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm <= guard) {
            return Err(Error::Divergence { step: step + 1, norm, guard });
        }
    }
    Ok(x)
}
