use serde::{Deserialize, Serialize};

use super::TimeSeries;
use crate::error::{Error, Result};

/// One term `coef * prod_i x_i^powers[i]` of a polynomial observable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: f64,
    pub powers: Vec<u32>,
}

/// Scalar function of the state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// `x . e_index`
    Coordinate { index: usize },
    /// `w . x`
    Linear { weights: Vec<f64> },
    Polynomial { terms: Vec<Monomial> },
    Constant { value: f64 },
}

impl Observable {
    pub fn coordinate(index: usize) -> Self {
        Observable::Coordinate { index }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Observable::Coordinate { index } => x[*index],
            Observable::Linear { weights } => weights.iter().zip(x).map(|(w, v)| w * v).sum(),
            Observable::Polynomial { terms } => terms
                .iter()
                .map(|t| t.coef * t.powers.iter().zip(x).map(|(&p, &v)| v.powi(p as i32)).product::<f64>())
                .sum(),
            Observable::Constant { value } => *value,
        }
    }

    /// Checks that the observable can be evaluated on states of `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let ok = match self {
            Observable::Coordinate { index } => *index < dim,
            Observable::Linear { weights } => weights.len() == dim && weights.iter().all(|w| w.is_finite()),
            Observable::Polynomial { terms } => {
                terms.iter().all(|t| t.powers.len() == dim && t.coef.is_finite())
            }
            Observable::Constant { value } => value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("observable {self:?} does not apply to {dim}-dimensional states")))
        }
    }
}

/// Applies `obs` to every state of a trajectory sampled every `dt_samp`.
pub fn observe(trajectory: &[Vec<f64>], obs: &Observable, dt_samp: f64) -> Result<TimeSeries> {
    let first = trajectory.first().ok_or_else(|| Error::InvalidParameter("cannot observe an empty trajectory".into()))?;
    obs.validate(first.len())?;
    TimeSeries::scalar(trajectory.iter().map(|x| obs.eval(x)).collect(), dt_samp, 0.0)
}
