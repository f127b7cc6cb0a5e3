use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::format_f64;
use crate::error::{Error, Result};
use crate::rng;

/// Default number of leading samples dropped from flow trajectories.
pub const DEFAULT_BURN_IN: usize = 1000;

const WEIGHT_TOL: f64 = 1e-12;

/// Weighted point cloud in `R^dim`, points stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or_else(|| Error::InvalidParameter("empty measure".into()))?;
        let mut flat = Vec::with_capacity(dim * points.len());
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            flat.extend_from_slice(p);
        }
        Self::uniform_flat(dim, flat)
    }

    pub fn uniform_flat(dim: usize, points: Vec<f64>) -> Result<Self> {
        if dim == 0 || points.is_empty() || points.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!("measure needs K >= 1 points of dim >= 1 (dim {dim})")));
        }
        let k = points.len() / dim;
        Self::weighted_flat(dim, points, vec![1.0 / k as f64; k])
    }

    pub fn weighted_flat(dim: usize, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || points.is_empty() || points.len() != dim * weights.len() {
            return Err(Error::InvalidParameter(format!(
                "measure shape mismatch: dim {dim}, {} coordinates, {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(i) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("measure point {}", i / dim)));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("measure weights must be finite and >= 0".into()));
        }
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidParameter(format!("measure weights sum to {total}, not 1")));
        }
        Ok(Self { dim, points, weights })
    }

    pub fn point_mass(x: Vec<f64>) -> Result<Self> {
        let dim = x.len();
        Self::uniform_flat(dim, x)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|&x| x == w)
    }

    /// Same measure with every point's coordinates reversed.
    pub fn reversed_coordinates(&self) -> Self {
        let mut points = self.points.clone();
        for p in points.chunks_exact_mut(self.dim) {
            p.reverse();
        }
        Self { dim: self.dim, points, weights: self.weights.clone() }
    }

    /// Keeps the coordinates listed in `coords`, in that order.
    pub fn project(&self, coords: &[usize]) -> Result<Self> {
        if coords.is_empty() || coords.iter().any(|&c| c >= self.dim) {
            return Err(Error::InvalidParameter(format!("bad projection {coords:?} of {}-dim measure", self.dim)));
        }
        let points = self.points().flat_map(|p| coords.iter().map(move |&c| p[c])).collect();
        Ok(Self { dim: coords.len(), points, weights: self.weights.clone() })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("w");
        for j in 1..=self.dim {
            let _ = write!(out, ",x{j}");
        }
        out.push('\n');
        for (p, w) in self.points().zip(&self.weights) {
            out.push_str(&format_f64(*w));
            for v in p {
                out.push(',');
                out.push_str(&format_f64(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let parse_err = |msg: String| Error::Parse { file: "measure CSV".into(), msg };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| parse_err("empty file".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 2 || cols[0] != "w" || cols[1..].iter().enumerate().any(|(j, c)| *c != format!("x{}", j + 1)) {
            return Err(parse_err(format!("bad header {header:?}")));
        }
        let dim = cols.len() - 1;
        let mut weights = Vec::new();
        let mut points = Vec::new();
        for (row, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != dim + 1 {
                return Err(parse_err(format!("row {row}: expected {} fields", dim + 1)));
            }
            let mut nums = fields.iter().map(|f| f.parse::<f64>().map_err(|e| parse_err(format!("row {row}: {e}"))));
            weights.push(nums.next().unwrap()?);
            for v in nums {
                points.push(v?);
            }
        }
        Self::weighted_flat(dim, points, weights)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|_| Error::MissingArtifact(path.display().to_string()))?;
        Self::from_csv(&text)
    }
}

/// Neumaier summation; plain summation of `K` copies of `1/K` drifts past
/// the weight tolerance for `K` around 1e5.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Maps every support point through `f`, keeping the weights.
///
/// Points are mapped in parallel; on failure the lowest failing index is
/// reported.
pub fn pushforward<F>(mu: &EmpiricalMeasure, f: F) -> Result<EmpiricalMeasure>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let mapped: Vec<Result<Vec<f64>>> = (0..mu.len()).into_par_iter().map(|i| f(mu.point(i))).collect();
    let mut dim = None;
    let mut flat = Vec::new();
    for (index, r) in mapped.into_iter().enumerate() {
        let p = r.map_err(|e| Error::AtPoint { index, source: Box::new(e) })?;
        match dim {
            None => dim = Some(p.len()),
            Some(d) if d != p.len() => return Err(Error::DimensionMismatch { expected: d, got: p.len() }),
            _ => {}
        }
        flat.extend(p);
    }
    let dim = dim.unwrap_or(0);
    if let Some(i) = flat.iter().position(|v| !v.is_finite()) {
        return Err(Error::AtPoint { index: i / dim.max(1), source: Box::new(Error::NonFinite("pushforward".into())) });
    }
    Ok(EmpiricalMeasure { dim, points: flat, weights: mu.weights.clone() })
}

/// Uniform measure over the states after the first `burn_in`.
pub fn state_measure(trajectory: &[Vec<f64>], burn_in: usize) -> Result<EmpiricalMeasure> {
    if burn_in >= trajectory.len() {
        return Err(Error::InvalidParameter(format!(
            "burn_in {burn_in} leaves no states of a {}-state trajectory",
            trajectory.len()
        )));
    }
    EmpiricalMeasure::uniform(trajectory[burn_in..].to_vec())
}

/// Draws `n` support points without replacement; the result has uniform
/// weights.
pub fn subsample(mu: &EmpiricalMeasure, n: usize, seed: u64) -> Result<EmpiricalMeasure> {
    subsample_indices(mu.len(), n, seed).map(|idx| select(mu, &idx))
}

pub(crate) fn subsample_indices(k: usize, n: usize, seed: u64) -> Result<Vec<usize>> {
    if n == 0 || n > k {
        return Err(Error::InvalidParameter(format!("cannot draw {n} of {k} points without replacement")));
    }
    let mut r = rng::stream(seed, 0x7375627361);
    Ok(rand::seq::index::sample(&mut r, k, n).into_vec())
}

pub(crate) fn select(mu: &EmpiricalMeasure, idx: &[usize]) -> EmpiricalMeasure {
    let points = idx.iter().flat_map(|&i| mu.point(i).iter().copied()).collect();
    EmpiricalMeasure { dim: mu.dim, points, weights: vec![1.0 / idx.len() as f64; idx.len()] }
}
