use super::{DynamicalModel, State};
use crate::error::{Error, Result};

/// Rigid rotation of the 2-torus, `(z1, z2) -> (z1 + alpha, z2 + beta) mod 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusRotation {
    pub alpha: f64,
    pub beta: f64,
}

impl TorusRotation {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1), got {v}")));
            }
        }
        Ok(Self { alpha, beta })
    }
}

/// Reduces to [0, 1). `rem_euclid` can round up to exactly 1.0 for tiny
/// negative inputs.
pub(crate) fn wrap_unit(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl DynamicalModel for TorusRotation {
    fn state_dim(&self) -> usize {
        2
    }

    fn params(&self) -> Vec<f64> {
        vec![self.alpha, self.beta]
    }

    fn advance(&self, x: &[f64]) -> Result<State> {
        Ok(vec![wrap_unit(x[0] + self.alpha), wrap_unit(x[1] + self.beta)])
    }
}
