//! Benchmark dynamical systems behind a uniform "advance by one sampling
//! interval" interface.

mod integrate;
mod ks;
mod lorenz;
mod torus;

pub use integrate::{integrate_flow, FlowIntegrator, Method, DEFAULT_OVERFLOW_GUARD};
pub use ks::{KsConfig, KsModel};
pub use lorenz::{Lorenz63, Lorenz63Field};
pub use torus::TorusRotation;

use crate::error::{Error, Result};

pub type State = Vec<f64>;
pub type Trajectory = Vec<State>;

/// A parameterized evolution rule advancing a state by one sampling interval.
///
/// Implementations must be deterministic and immutable after construction.
pub trait DynamicalModel: Send + Sync {
    fn state_dim(&self) -> usize;

    fn params(&self) -> Vec<f64>;

    /// Advances a state that has already been checked for dimension and
    /// finiteness.
    fn advance(&self, x: &[f64]) -> Result<State>;
}

pub(crate) fn check_state(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: x.len() });
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("state component {i} = {}", x[i])));
    }
    Ok(())
}

pub fn step_map(model: &dyn DynamicalModel, x: &[f64]) -> Result<State> {
    check_state(model.state_dim(), x)?;
    model.advance(x)
}

/// Applies `step_map` `n` times.
pub fn iterate(model: &dyn DynamicalModel, x: &[f64], n: usize) -> Result<State> {
    check_state(model.state_dim(), x)?;
    let mut cur = x.to_vec();
    for _ in 0..n {
        cur = model.advance(&cur)?;
    }
    Ok(cur)
}

/// Returns `n_steps + 1` states starting at `x0`.
///
/// Divergence errors are re-indexed to the trajectory index at which the
/// state blew up.
pub fn simulate(model: &dyn DynamicalModel, x0: &[f64], n_steps: usize) -> Result<Trajectory> {
    check_state(model.state_dim(), x0)?;
    let mut traj = Vec::with_capacity(n_steps + 1);
    traj.push(x0.to_vec());
    for i in 0..n_steps {
        let next = model.advance(&traj[i]).map_err(|e| match e {
            Error::Divergence { norm, guard, .. } => Error::Divergence { step: i + 1, norm, guard },
            other => other,
        })?;
        traj.push(next);
    }
    Ok(traj)
}
