use super::{DynamicalModel, FlowIntegrator, State};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lorenz63Field {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
}

impl Default for Lorenz63Field {
    fn default() -> Self {
        Self { sigma: 10.0, rho: 28.0, beta: 8.0 / 3.0 }
    }
}

impl Lorenz63Field {
    pub fn new(sigma: f64, rho: f64, beta: f64) -> Self {
        Self { sigma, rho, beta }
    }

    #[inline]
    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.sigma * (x[1] - x[0]);
        out[1] = x[0] * (self.rho - x[2]) - x[1];
        out[2] = x[0] * x[1] - self.beta * x[2];
    }
}

/// Flow map of `time_scale * F(x)` over one sampling interval
/// (`integrator.n_sub * integrator.dt_int`).
///
/// `time_scale = 1` is the classical system; `time_scale -> 0` approaches
/// the identity map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lorenz63 {
    pub field: Lorenz63Field,
    pub time_scale: f64,
    pub integrator: FlowIntegrator,
}

impl Lorenz63 {
    pub fn new(field: Lorenz63Field, time_scale: f64, integrator: FlowIntegrator) -> Result<Self> {
        integrator.validate()?;
        let p = [field.sigma, field.rho, field.beta, time_scale];
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite Lorenz parameters {p:?}")));
        }
        Ok(Self { field, time_scale, integrator })
    }

    pub fn dt_samp(&self) -> f64 {
        self.integrator.dt_int * self.integrator.n_sub as f64
    }
}

impl DynamicalModel for Lorenz63 {
    fn state_dim(&self) -> usize {
        3
    }

    fn params(&self) -> Vec<f64> {
        vec![self.field.sigma, self.field.rho, self.field.beta, self.time_scale]
    }

    fn advance(&self, x: &[f64]) -> Result<State> {
        let c = self.time_scale;
        let field = self.field;
        self.integrator.run(
            move |s: &[f64], out: &mut [f64]| {
                field.eval(s, out);
                out[0] *= c;
                out[1] *= c;
                out[2] *= c;
            },
            x,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate_flow, simulate, step_map, Method};

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
        num / den
    }

    #[test]
    fn rk4_sampling_step_matches_fine_euler() {
        // dt_int = 0.01 leaves a 1.9e-6 relative error over this interval;
        // 0.005 brings RK4 to ~1e-7.
        let model = Lorenz63::new(Lorenz63Field::default(), 1.0, FlowIntegrator::new(Method::Rk4, 0.005, 20)).unwrap();
        let x = step_map(&model, &[1.0, 1.0, 1.0]).unwrap();
        // Euler with dt = 1e-6 over the same 0.1 interval carries an O(dt)
        // error of a few 1e-6, so the oracle Richardson-extrapolates it
        // against dt = 5e-7.
        let f = Lorenz63Field::default();
        let e1 = integrate_flow(|s, o| f.eval(s, o), &[1.0, 1.0, 1.0], 1e-6, 100_000, Method::Euler).unwrap();
        let e2 = integrate_flow(|s, o| f.eval(s, o), &[1.0, 1.0, 1.0], 5e-7, 200_000, Method::Euler).unwrap();
        let oracle: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| 2.0 * b - a).collect();
        assert!(rel_err(&e1, &oracle) > 1e-6);
        let e = rel_err(&x, &oracle);
        assert!(e < 1e-6, "relative error {e}");
    }

    #[test]
    fn rk4_unit_horizon_matches_step_halving_reference() {
        let f = Lorenz63Field::default();
        let coarse = integrate_flow(|s, o| f.eval(s, o), &[1.0, 1.0, 1.0], 0.01, 100, Method::Rk4).unwrap();
        let fine = integrate_flow(|s, o| f.eval(s, o), &[1.0, 1.0, 1.0], 1e-5, 100_000, Method::Rk4).unwrap();
        let e = rel_err(&coarse, &fine);
        assert!(e < 1e-4, "relative error {e}");
    }

    #[test]
    fn long_euler_trajectory_stays_bounded() {
        let model = Lorenz63::new(Lorenz63Field::default(), 1.0, FlowIntegrator::new(Method::Euler, 0.01, 1)).unwrap();
        let traj = simulate(&model, &[1.0, 1.0, 1.0], 200_000).unwrap();
        let max_norm = traj.iter().map(|s| s.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max);
        assert!(max_norm < 100.0, "max norm {max_norm}");
    }

    #[test]
    fn zero_time_scale_is_identity() {
        let model = Lorenz63::new(Lorenz63Field::default(), 0.0, FlowIntegrator::new(Method::Rk4, 0.01, 10)).unwrap();
        let x = [3.0, -2.0, 20.0];
        assert_eq!(step_map(&model, &x).unwrap(), x.to_vec());
    }
}
