use std::fmt::Write as _;
use std::path::Path;

use rand_distr::{Distribution, Normal};

use super::format_f64;
use crate::error::{Error, Result};
use crate::rng;

/// Evenly sampled observations of dimension `dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dim: usize,
    data: Vec<f64>,
    pub dt_samp: f64,
    pub t0: f64,
}

impl TimeSeries {
    pub fn new(samples: Vec<Vec<f64>>, dt_samp: f64, t0: f64) -> Result<Self> {
        let dim = samples.first().map(Vec::len).ok_or_else(|| Error::InvalidParameter("empty time series".into()))?;
        if dim == 0 {
            return Err(Error::InvalidParameter("time series samples must have dimension >= 1".into()));
        }
        let mut data = Vec::with_capacity(dim * samples.len());
        for s in &samples {
            if s.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: s.len() });
            }
            data.extend_from_slice(s);
        }
        Self::from_flat(dim, data, dt_samp, t0)
    }

    pub fn scalar(values: Vec<f64>, dt_samp: f64, t0: f64) -> Result<Self> {
        Self::from_flat(1, values, dt_samp, t0)
    }

    pub fn from_flat(dim: usize, data: Vec<f64>, dt_samp: f64, t0: f64) -> Result<Self> {
        if dim == 0 || data.is_empty() || data.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "time series needs >= 1 sample of dimension >= 1 (dim {dim}, {} values)",
                data.len()
            )));
        }
        if !(dt_samp > 0.0 && dt_samp.is_finite()) || !t0.is_finite() {
            return Err(Error::InvalidParameter(format!("dt_samp must be > 0, got {dt_samp}")));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("time series sample {}", i / dim)));
        }
        Ok(Self { dim, data, dt_samp, t0 })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn samples(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.data
    }

    pub fn component(&self, j: usize) -> Vec<f64> {
        self.samples().map(|s| s[j]).collect()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt_samp
    }

    /// Keeps samples `start..end`, shifting `t0` accordingly.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::InvalidParameter(format!("bad slice {start}..{end} of {}", self.len())));
        }
        Self::from_flat(
            self.dim,
            self.data[start * self.dim..end * self.dim].to_vec(),
            self.dt_samp,
            self.time(start),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for j in 1..=self.dim {
            let _ = write!(out, ",v{j}");
        }
        out.push('\n');
        for (i, s) in self.samples().enumerate() {
            out.push_str(&format_f64(self.time(i)));
            for v in s {
                out.push(',');
                out.push_str(&format_f64(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let parse_err = |msg: String| Error::Parse { file: "time series CSV".into(), msg };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| parse_err("empty file".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 2 || cols[0] != "t" || cols[1..].iter().enumerate().any(|(j, c)| *c != format!("v{}", j + 1)) {
            return Err(parse_err(format!("bad header {header:?}")));
        }
        let dim = cols.len() - 1;
        let mut times = Vec::new();
        let mut data = Vec::new();
        for (row, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != dim + 1 {
                return Err(parse_err(format!("row {row}: expected {} fields", dim + 1)));
            }
            let mut nums = fields.iter().map(|f| f.parse::<f64>().map_err(|e| parse_err(format!("row {row}: {e}"))));
            times.push(nums.next().unwrap()?);
            for v in nums {
                data.push(v?);
            }
        }
        let t0 = *times.first().ok_or_else(|| parse_err("no rows".into()))?;
        let dt = if times.len() > 1 { (times[times.len() - 1] - t0) / (times.len() - 1) as f64 } else { 1.0 };
        Self::from_flat(dim, data, dt, t0)
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

/// Adds i.i.d. Gaussian noise with standard deviation `sigma` to every entry.
pub fn add_noise(series: &TimeSeries, sigma: f64, seed: u64) -> Result<TimeSeries> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(series.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = rng::stream(seed, 0x6e6f697365);
    let data = series.flat().iter().map(|v| v + normal.sample(&mut rng)).collect();
    TimeSeries::from_flat(series.dim(), data, series.dt_samp, series.t0)
}
