//! Discrepancies between empirical measures.
//!
//! All double sums and projection loops are evaluated in parallel but
//! reduced in a fixed order, so results do not depend on the thread count.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::EmpiricalMeasure;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    EnergyMmd,
    SlicedWasserstein,
    Wasserstein1d,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub kind: MetricKind,
    #[serde(default = "default_projections")]
    pub n_projections: usize,
    #[serde(default = "default_p")]
    pub p: u32,
    #[serde(default)]
    pub seed: u64,
}

fn default_projections() -> usize {
    100
}

fn default_p() -> u32 {
    2
}

impl MetricSpec {
    pub fn energy_mmd() -> Self {
        Self { kind: MetricKind::EnergyMmd, n_projections: default_projections(), p: default_p(), seed: 0 }
    }

    pub fn sliced_wasserstein(n_projections: usize, seed: u64) -> Self {
        Self { kind: MetricKind::SlicedWasserstein, n_projections, p: default_p(), seed }
    }

    pub fn wasserstein_1d(p: u32) -> Self {
        Self { kind: MetricKind::Wasserstein1d, n_projections: default_projections(), p, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_projections == 0 {
            return Err(Error::InvalidParameter("n_projections must be >= 1".into()));
        }
        if !(self.p == 1 || self.p == 2) {
            return Err(Error::InvalidParameter(format!("metric order p must be 1 or 2, got {}", self.p)));
        }
        Ok(())
    }

    pub fn distance(&self, p: &EmpiricalMeasure, q: &EmpiricalMeasure) -> Result<f64> {
        self.validate()?;
        match self.kind {
            MetricKind::EnergyMmd => energy_mmd(p, q),
            MetricKind::SlicedWasserstein => sliced_wasserstein(p, q, self),
            MetricKind::Wasserstein1d => wasserstein_1d(p, q, self.p),
        }
    }
}

fn check_dims(p: &EmpiricalMeasure, q: &EmpiricalMeasure) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: q.dim() });
    }
    Ok(())
}

/// `sum_ij a_i b_j |x_i - y_j|`, rows in parallel, reduced in row order.
fn mean_distance(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> f64 {
    let rows: Vec<f64> = (0..a.len())
        .into_par_iter()
        .map(|i| {
            let x = a.point(i);
            let s: f64 = b
                .points()
                .zip(b.weights())
                .map(|(y, &w)| w * x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt())
                .sum();
            a.weights()[i] * s
        })
        .collect();
    rows.iter().sum()
}

/// Energy-distance MMD (V-statistic):
/// `sqrt(max(0, 2 E|X-Y| - E|X-X'| - E|Y-Y'|))`.
pub fn energy_mmd(p: &EmpiricalMeasure, q: &EmpiricalMeasure) -> Result<f64> {
    check_dims(p, q)?;
    let xy = mean_distance(p, q);
    let xx = mean_distance(p, p);
    let yy = mean_distance(q, q);
    Ok((2.0 * xy - xx - yy).max(0.0).sqrt())
}

fn sorted_1d(values: &[f64], weights: &[f64]) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = values.iter().copied().zip(weights.iter().copied()).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// `W_p^p` between two sorted weighted samples by monotone (quantile)
/// coupling.
fn wasserstein_pow_sorted(a: &[(f64, f64)], b: &[(f64, f64)], p: u32) -> f64 {
    let cost = |x: f64, y: f64| {
        let d = (x - y).abs();
        if p == 1 {
            d
        } else {
            d.powi(p as i32)
        }
    };
    if a.len() == b.len() && a.iter().chain(b).all(|&(_, w)| w == a[0].1) {
        let w = a[0].1;
        return a.iter().zip(b).map(|(x, y)| w * cost(x.0, y.0)).sum();
    }
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a[0].1, b[0].1);
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let m = ra.min(rb);
        total += m * cost(a[i].0, b[j].0);
        ra -= m;
        rb -= m;
        if ra <= 0.0 {
            i += 1;
            if i < a.len() {
                ra = a[i].1;
            }
        }
        if rb <= 0.0 {
            j += 1;
            if j < b.len() {
                rb = b[j].1;
            }
        }
    }
    total
}

/// Exact p-Wasserstein distance between one-dimensional measures.
pub fn wasserstein_1d(p: &EmpiricalMeasure, q: &EmpiricalMeasure, order: u32) -> Result<f64> {
    check_dims(p, q)?;
    if p.dim() != 1 {
        return Err(Error::InvalidParameter(format!("wasserstein_1d needs 1-D measures, got dim {}", p.dim())));
    }
    if !(order == 1 || order == 2) {
        return Err(Error::InvalidParameter(format!("order must be 1 or 2, got {order}")));
    }
    let a = sorted_1d(p.flat(), p.weights());
    let b = sorted_1d(q.flat(), q.weights());
    Ok(wasserstein_pow_sorted(&a, &b, order).max(0.0).powf(1.0 / order as f64))
}

/// Unit directions for the sliced metric, normalized Gaussian draws.
///
/// Directions come in mirrored pairs `(u, reverse(u))` (an odd count ends
/// with one palindromic direction), so the set is closed under reversing
/// the coordinate order and the sliced distance is exactly invariant under
/// a simultaneous reversal of both clouds.
pub fn projection_directions(dim: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng::stream(seed, 0x736c696365);
    let mut draw = |symmetric: bool| loop {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut r)).collect();
        if symmetric {
            let rev: Vec<f64> = v.iter().rev().copied().collect();
            v.iter_mut().zip(rev).for_each(|(a, b)| *a += b);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect::<Vec<f64>>();
        }
    };
    let mut out = Vec::with_capacity(n);
    while out.len() + 1 < n {
        let u = draw(false);
        let mirrored = u.iter().rev().copied().collect();
        out.push(u);
        out.push(mirrored);
    }
    if out.len() < n {
        out.push(draw(true));
    }
    out
}

fn project(mu: &EmpiricalMeasure, u: &[f64]) -> Vec<(f64, f64)> {
    let vals: Vec<f64> = mu.points().map(|x| x.iter().zip(u).map(|(a, b)| a * b).sum()).collect();
    sorted_1d(&vals, mu.weights())
}

/// Root-mean over random unit directions `u` of `W_p(u.P, u.Q)^p`.
pub fn sliced_wasserstein(p: &EmpiricalMeasure, q: &EmpiricalMeasure, spec: &MetricSpec) -> Result<f64> {
    check_dims(p, q)?;
    spec.validate()?;
    let dirs = projection_directions(p.dim(), spec.n_projections, spec.seed);
    let per_dir: Vec<f64> =
        dirs.par_iter().map(|u| wasserstein_pow_sorted(&project(p, u), &project(q, u), spec.p)).collect();
    let mean = per_dir.iter().sum::<f64>() / per_dir.len() as f64;
    Ok(mean.max(0.0).powf(1.0 / spec.p as f64))
}
