use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Objective;
use crate::error::{Error, Result};
use crate::measure::{subsample_indices, EmpiricalMeasure};
use crate::metrics::MetricSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeRow {
    pub theta: Vec<f64>,
    pub loss: f64,
}

/// Evaluates the objective at every grid point, returned in grid order.
pub fn scan_landscape(objective: &Objective, grid: &[Vec<f64>]) -> Result<Vec<LandscapeRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("landscape grid is empty".into()));
    }
    grid.par_iter()
        .map(|theta| objective.eval(theta).map(|loss| LandscapeRow { theta: theta.clone(), loss }))
        .collect()
}

/// `a, a + step, ...` up to `b` inclusive (with a half-step tolerance).
pub fn grid_1d(a: f64, b: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("bad grid {a}:{b}:{step}")));
    }
    let n = ((b - a) / step + 0.5).floor() as usize;
    Ok((0..=n).map(|i| a + i as f64 * step).collect())
}

/// Cartesian product of per-axis grids, last axis fastest.
pub fn product_grid(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        out = out.into_iter().flat_map(|p| axis.iter().map(move |&v| [p.clone(), vec![v]].concat())).collect();
    }
    out
}

/// Distance between two disjoint random subsamples of size `n`: the
/// finite-sample floor below which two draws of `mu` cannot be told apart.
pub fn self_distance_floor(mu: &EmpiricalMeasure, n: usize, metric: &MetricSpec, seed: u64) -> Result<f64> {
    let idx = subsample_indices(mu.len(), 2 * n, seed)?;
    let pick = |ids: &[usize]| {
        EmpiricalMeasure::uniform_flat(mu.dim(), ids.iter().flat_map(|&i| mu.point(i).iter().copied()).collect())
    };
    metric.distance(&pick(&idx[..n])?, &pick(&idx[n..])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = grid_1d(0.5, 1.5, 0.05).unwrap();
        assert_eq!(g.len(), 21);
        assert!((g[20] - 1.5).abs() < 1e-12);
        assert!(grid_1d(1.0, 0.0, 0.1).is_err());
        let p = product_grid(&[vec![0.0, 1.0], vec![2.0, 3.0, 4.0]]);
        assert_eq!(p.len(), 6);
        assert_eq!(p[1], vec![0.0, 3.0]);
    }

    #[test]
    fn floor_needs_enough_points() {
        let mu = EmpiricalMeasure::uniform((0..10).map(|i| vec![i as f64]).collect()).unwrap();
        assert!(self_distance_floor(&mu, 6, &MetricSpec::energy_mmd(), 0).is_err());
        let f = self_distance_floor(&mu, 5, &MetricSpec::energy_mmd(), 0).unwrap();
        assert!(f > 0.0);
    }
}
