//! Box-constrained Nelder–Mead with a full evaluation trace.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ParamBox;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Tolerance,
    MaxIter,
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub theta: Vec<f64>,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub theta_star: Vec<f64>,
    pub loss_star: f64,
    pub n_evals: usize,
    pub termination: Termination,
    pub trace: Vec<TraceEntry>,
    /// Best vertex loss after each iteration (index 0 is the initial simplex).
    #[serde(default)]
    pub best_history: Vec<f64>,
}

impl OptResult {
    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    /// Initial simplex edge as a fraction of the box width (absolute when
    /// the box is unbounded).
    pub initial_step: f64,
    /// Iterations without improvement of the best vertex before giving up.
    pub stall_iter: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_iter: 500, f_tol: 1e-10, x_tol: 1e-8, initial_step: 0.1, stall_iter: 200 }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

struct Counter<'a, F> {
    f: &'a F,
    n_evals: usize,
}

impl<F: Fn(&[f64]) -> Result<f64>> Counter<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.n_evals += 1;
        let v = (self.f)(x)?;
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64, bounds: &ParamBox) -> Vec<f64> {
    // a + t (b - a)
    let mut x: Vec<f64> = a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect();
    bounds.project(&mut x);
    x
}

/// Minimizes `f` from `theta0` inside `bounds`. Trial points are projected
/// onto the box; NaN values count as `+inf`.
pub fn nelder_mead<F>(f: F, theta0: &[f64], bounds: &ParamBox, opts: &NelderMeadOptions) -> Result<OptResult>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    bounds.check(theta0)?;
    let n = theta0.len();
    let mut counter = Counter { f: &f, n_evals: 0 };
    let mut trace = Vec::new();

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = counter.eval(theta0)?;
    simplex.push((theta0.to_vec(), v0));
    for i in 0..n {
        let width = bounds.hi[i] - bounds.lo[i];
        let step = if width.is_finite() { opts.initial_step * width } else { opts.initial_step.max(1e-3) };
        let mut x = theta0.to_vec();
        x[i] = if x[i] + step <= bounds.hi[i] { x[i] + step } else { x[i] - step };
        bounds.project(&mut x);
        let v = counter.eval(&x)?;
        simplex.push((x, v));
    }
    for (x, v) in &simplex {
        trace.push(TraceEntry { iter: 0, theta: x.clone(), loss: *v });
    }
    let sort = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    sort(&mut simplex);
    let mut best_history = vec![simplex[0].1];

    let mut termination = Termination::MaxIter;
    let mut since_improvement = 0;
    for iter in 1..=opts.max_iter {
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let spread = simplex[n].1 - simplex[0].1;
        if diameter < opts.x_tol && (spread.is_finite() && spread.abs() < opts.f_tol) {
            termination = Termination::Tolerance;
            break;
        }
        if since_improvement >= opts.stall_iter {
            termination = Termination::Stalled;
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[n - 1].1;

        let xr = lerp(&centroid, &worst.0, -REFLECT, bounds);
        // A reflection clamped back onto the centroid would collapse the
        // simplex; count it as a failed reflection so the step contracts.
        let fr = if xr == centroid { f64::INFINITY } else { counter.eval(&xr)? };
        let mut accepted: Option<(Vec<f64>, f64)> = None;
        if fr < f_best {
            let xe = lerp(&centroid, &worst.0, -REFLECT * EXPAND, bounds);
            let fe = counter.eval(&xe)?;
            accepted = Some(if fe < fr { (xe, fe) } else { (xr, fr) });
        } else if fr < f_second {
            accepted = Some((xr, fr));
        } else if fr < worst.1 {
            let xc = lerp(&centroid, &xr, CONTRACT, bounds);
            let fc = counter.eval(&xc)?;
            if fc <= fr {
                accepted = Some((xc, fc));
            }
        } else {
            let xc = lerp(&centroid, &worst.0, CONTRACT, bounds);
            let fc = counter.eval(&xc)?;
            if fc < worst.1 {
                accepted = Some((xc, fc));
            }
        }

        match accepted {
            Some((x, v)) => {
                trace.push(TraceEntry { iter, theta: x.clone(), loss: v });
                simplex[n] = (x, v);
            }
            None => {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x = lerp(&best, &vertex.0, SHRINK, bounds);
                    let v = counter.eval(&x)?;
                    trace.push(TraceEntry { iter, theta: x.clone(), loss: v });
                    *vertex = (x, v);
                }
            }
        }
        sort(&mut simplex);
        if simplex[0].1 < *best_history.last().unwrap() {
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        best_history.push(simplex[0].1);
    }

    Ok(OptResult {
        theta_star: simplex[0].0.clone(),
        loss_star: simplex[0].1,
        n_evals: counter.n_evals,
        termination,
        trace,
        best_history,
    })
}

/// Draws a uniform start point inside a bounded box.
pub fn uniform_start(bounds: &ParamBox, seed: u64) -> Result<Vec<f64>> {
    use rand::Rng as _;
    if !bounds.is_finite() {
        return Err(Error::InvalidParameter("random starts need a bounded box".into()));
    }
    let mut r = rng::stream(seed, 0x7374617274);
    Ok(bounds.lo.iter().zip(&bounds.hi).map(|(l, h)| l + (h - l) * r.random::<f64>()).collect())
}

/// Independent Nelder–Mead runs from uniform random starts; restart `i`
/// draws its start from `derive_seed(seed, i)`. Runs execute concurrently
/// and are returned in restart order.
pub fn multi_start<F>(f: F, bounds: &ParamBox, restarts: usize, seed: u64, opts: &NelderMeadOptions) -> Result<Vec<OptResult>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let starts: Vec<Vec<f64>> =
        (0..restarts).map(|i| uniform_start(bounds, rng::derive_seed(seed, i as u64))).collect::<Result<_>>()?;
    starts.par_iter().map(|x0| nelder_mead(&f, x0, bounds, opts)).collect()
}

/// Projected gradient descent with central finite differences.
pub fn gradient_descent_fd<F>(
    f: F,
    theta0: &[f64],
    bounds: &ParamBox,
    learning_rate: f64,
    fd_step: f64,
    max_iter: usize,
) -> Result<OptResult>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    bounds.check(theta0)?;
    let mut n_evals = 0;
    let mut eval = |x: &[f64]| -> Result<f64> {
        n_evals += 1;
        f(x).map(|v| if v.is_nan() { f64::INFINITY } else { v })
    };
    let mut x = theta0.to_vec();
    let mut fx = eval(&x)?;
    let mut trace = vec![TraceEntry { iter: 0, theta: x.clone(), loss: fx }];
    let mut best = (x.clone(), fx);
    let mut best_history = vec![fx];
    for iter in 1..=max_iter {
        let mut grad = vec![0.0; x.len()];
        for i in 0..x.len() {
            let mut hi = x.clone();
            let mut lo = x.clone();
            hi[i] += fd_step;
            lo[i] -= fd_step;
            bounds.project(&mut hi);
            bounds.project(&mut lo);
            let h = hi[i] - lo[i];
            if h > 0.0 {
                grad[i] = (eval(&hi)? - eval(&lo)?) / h;
            }
        }
        for (v, g) in x.iter_mut().zip(&grad) {
            *v -= learning_rate * g;
        }
        bounds.project(&mut x);
        fx = eval(&x)?;
        trace.push(TraceEntry { iter, theta: x.clone(), loss: fx });
        if fx < best.1 {
            best = (x.clone(), fx);
        }
        best_history.push(best.1);
    }
    Ok(OptResult {
        theta_star: best.0,
        loss_star: best.1,
        n_evals,
        termination: Termination::MaxIter,
        trace,
        best_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unbounded(n: usize) -> ParamBox {
        ParamBox::unbounded(n)
    }

    #[test]
    fn quadratic_minimum() {
        let r = nelder_mead(|x| Ok((x[0] - 2.0).powi(2)), &[0.0], &unbounded(1), &NelderMeadOptions::default()).unwrap();
        assert!((r.theta_star[0] - 2.0).abs() < 1e-6, "{:?}", r.theta_star);
        assert_eq!(r.termination, Termination::Tolerance);
    }

    #[test]
    fn rosenbrock() {
        let rosen = |x: &[f64]| Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let opts = NelderMeadOptions { max_iter: 5000, f_tol: 1e-14, x_tol: 1e-10, ..Default::default() };
        let r = nelder_mead(rosen, &[-1.2, 1.0], &unbounded(2), &opts).unwrap();
        assert!((r.theta_star[0] - 1.0).abs() < 1e-4 && (r.theta_star[1] - 1.0).abs() < 1e-4, "{:?}", r.theta_star);
    }

    #[test]
    fn best_loss_is_monotone_and_in_trace() {
        let f = |x: &[f64]| Ok((x[0] - 0.3).abs().sqrt() + (x[1] + 0.2).powi(2));
        let b = ParamBox::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let r = nelder_mead(f, &[0.9, 0.9], &b, &NelderMeadOptions::default()).unwrap();
        assert!(r.best_history.windows(2).all(|w| w[1] <= w[0]));
        let min_trace = r.trace.iter().map(|t| t.loss).fold(f64::INFINITY, f64::min);
        assert!((r.loss_star - min_trace).abs() <= 1e-15);
        assert!(r.trace.iter().all(|t| b.contains(&t.theta)));
    }

    #[test]
    fn box_projection_finds_boundary_minimum() {
        let b = ParamBox::new(vec![0.5], vec![1.5]).unwrap();
        let r = nelder_mead(|x| Ok(-x[0]), &[0.7], &b, &NelderMeadOptions::default()).unwrap();
        assert!((r.theta_star[0] - 1.5).abs() < 1e-6);
    }

    #[test]
    fn clamped_reflection_does_not_collapse() {
        let b = ParamBox::new(vec![0.5], vec![80.0]).unwrap();
        let f = |x: &[f64]| Ok(if x[0] > 20.0 { 1e6 } else { (x[0] - 1.0).powi(2) });
        let r = nelder_mead(f, &[2.0], &b, &NelderMeadOptions { initial_step: 0.3, ..Default::default() }).unwrap();
        assert!((r.theta_star[0] - 1.0).abs() < 1e-4, "{:?}", r.theta_star);
    }

    #[test]
    fn nan_counts_as_infinity() {
        let f = |x: &[f64]| Ok(if x[0] > 1.0 { f64::NAN } else { (x[0] - 0.5).powi(2) });
        let r = nelder_mead(f, &[0.9], &unbounded(1), &NelderMeadOptions { initial_step: 0.5, ..Default::default() }).unwrap();
        assert!((r.theta_star[0] - 0.5).abs() < 1e-5);
    }

    #[test]
    fn start_outside_box_is_rejected() {
        let b = ParamBox::new(vec![0.0], vec![1.0]).unwrap();
        assert!(nelder_mead(|x| Ok(x[0]), &[2.0], &b, &NelderMeadOptions::default()).is_err());
    }

    #[test]
    fn multi_start_is_deterministic() {
        let b = ParamBox::new(vec![-2.0], vec![2.0]).unwrap();
        let f = |x: &[f64]| Ok((x[0] * 3.0).sin() + 0.1 * x[0] * x[0]);
        let a = multi_start(f, &b, 4, 17, &NelderMeadOptions::default()).unwrap();
        let c = multi_start(f, &b, 4, 17, &NelderMeadOptions::default()).unwrap();
        assert_eq!(a, c);
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn finite_difference_descent() {
        let r = gradient_descent_fd(|x| Ok((x[0] - 1.0).powi(2) + 2.0 * x[1] * x[1]), &[3.0, 1.0], &unbounded(2), 0.1, 1e-5, 200)
            .unwrap();
        assert!((r.theta_star[0] - 1.0).abs() < 1e-6 && r.theta_star[1].abs() < 1e-6);
    }
}
