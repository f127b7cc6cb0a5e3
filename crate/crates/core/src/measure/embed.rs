use serde::{Deserialize, Serialize};

use super::{EmpiricalMeasure, Observable, TimeSeries};
use crate::dynamics::{check_state, DynamicalModel};
use crate::error::{Error, Result};

/// Embedding dimension `m` and discrete delay `tau_bar`; the physical delay
/// is `tau_bar * dt_samp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayParams {
    pub m: usize,
    pub tau_bar: usize,
}

impl DelayParams {
    pub fn new(m: usize, tau_bar: usize) -> Result<Self> {
        let p = Self { m, tau_bar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.tau_bar == 0 {
            return Err(Error::InvalidParameter(format!(
                "delay parameters need m >= 1 and tau_bar >= 1, got m = {}, tau_bar = {}",
                self.m, self.tau_bar
            )));
        }
        Ok(())
    }

    /// Samples spanned by one delay vector minus one, `(m - 1) tau_bar`.
    pub fn window(&self) -> usize {
        (self.m - 1) * self.tau_bar
    }

    /// Number of delay vectors `K = N - (m - 1) tau_bar` for a series of
    /// length `n`.
    pub fn point_count(&self, n: usize) -> Result<usize> {
        self.validate()?;
        match n.checked_sub(self.window()) {
            Some(k) if k > 0 => Ok(k),
            _ => Err(Error::EmbeddingTooShort { n, m: self.m, tau_bar: self.tau_bar }),
        }
    }

    pub fn tau(&self, dt_samp: f64) -> f64 {
        self.tau_bar as f64 * dt_samp
    }
}

/// Ordering of the coordinates inside a delay vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordOrder {
    /// `(y(t_i), y(t_{i + tau_bar}), ..., y(t_{i + (m-1) tau_bar}))`, the
    /// order produced by [`delay_map_apply`].
    #[default]
    Ascending,
    /// `(y(t_{i + (m-1) tau_bar}), ..., y(t_i))`.
    Descending,
}

/// Delay-coordinate measure of a scalar series, newest sample first.
pub fn delay_embed(series: &TimeSeries, params: DelayParams) -> Result<EmpiricalMeasure> {
    delay_embed_ordered(series, params, CoordOrder::Descending)
}

pub fn delay_embed_ordered(series: &TimeSeries, params: DelayParams, order: CoordOrder) -> Result<EmpiricalMeasure> {
    if series.dim() != 1 {
        return Err(Error::InvalidParameter(format!("delay embedding needs a scalar series, got dim {}", series.dim())));
    }
    let k = params.point_count(series.len())?;
    let y = series.flat();
    let mut points = Vec::with_capacity(k * params.m);
    for i in 0..k {
        match order {
            CoordOrder::Ascending => points.extend((0..params.m).map(|j| y[i + j * params.tau_bar])),
            CoordOrder::Descending => points.extend((0..params.m).rev().map(|j| y[i + j * params.tau_bar])),
        }
    }
    EmpiricalMeasure::uniform_flat(params.m, points)
}

/// `(obs(x), obs(T x), ..., obs(T^{m-1} x))` where `T` is one model step.
pub fn delay_map_apply(model: &dyn DynamicalModel, obs: &Observable, m: usize, x: &[f64]) -> Result<Vec<f64>> {
    delay_map_apply_strided(model, obs, m, 1, x)
}

/// Delay map where each delay advances `stride` model steps, i.e. `T` is the
/// `stride`-fold composition of the model step.
pub fn delay_map_apply_strided(
    model: &dyn DynamicalModel,
    obs: &Observable,
    m: usize,
    stride: usize,
    x: &[f64],
) -> Result<Vec<f64>> {
    if m == 0 || stride == 0 {
        return Err(Error::InvalidParameter("delay map needs m >= 1 and stride >= 1".into()));
    }
    check_state(model.state_dim(), x)?;
    let mut out = Vec::with_capacity(m);
    let mut cur = x.to_vec();
    out.push(obs.eval(&cur));
    for _ in 1..m {
        for _ in 0..stride {
            cur = model.advance(&cur)?;
        }
        out.push(obs.eval(&cur));
    }
    Ok(out)
}
