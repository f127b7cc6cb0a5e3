//! Long-format tables for plotting a finished run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::identify::OptResult;
use crate::measure::{format_f64, EmpiricalMeasure, TimeSeries};

#[derive(Debug, Clone)]
pub struct PlotOptions {
    /// Delay coordinates shown in the 2-D projection.
    pub coords: (usize, usize),
    pub bins: usize,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self { coords: (0, 1), bins: 50 }
    }
}

fn require(dir: &Path, name: &str) -> Result<PathBuf> {
    let p = dir.join(name);
    if p.is_file() {
        Ok(p)
    } else {
        Err(Error::MissingArtifact(p.display().to_string()))
    }
}

fn optional(dir: &Path, name: &str) -> Option<PathBuf> {
    let p = dir.join(name);
    p.is_file().then_some(p)
}

pub fn series_table(series: &TimeSeries) -> String {
    let mut out = String::from("t,component,value\n");
    for i in 0..series.len() {
        let t = format_f64(series.time(i));
        for (j, v) in series.sample(i).iter().enumerate() {
            let _ = writeln!(out, "{t},{},{}", j + 1, format_f64(*v));
        }
    }
    out
}

pub fn trace_table(restarts: &[OptResult], labels: &[String]) -> String {
    let mut out = String::from("restart,iter,");
    for l in labels {
        out.push_str(l);
        out.push(',');
    }
    out.push_str("loss\n");
    for (r, res) in restarts.iter().enumerate() {
        for e in &res.trace {
            let _ = write!(out, "{r},{},", e.iter);
            for v in &e.theta {
                out.push_str(&format_f64(*v));
                out.push(',');
            }
            let _ = writeln!(out, "{}", format_f64(e.loss));
        }
    }
    out
}

/// Coordinates `(a, b)` of every support point, with its weight.
pub fn projection_table(mu: &EmpiricalMeasure, a: usize, b: usize) -> Result<String> {
    if a >= mu.dim() || b >= mu.dim() {
        return Err(Error::InvalidParameter(format!("projection ({a}, {b}) of a {}-d measure", mu.dim())));
    }
    let mut out = String::from("x,y,w\n");
    for (p, w) in mu.points().zip(mu.weights()) {
        let _ = writeln!(out, "{},{},{}", format_f64(p[a]), format_f64(p[b]), format_f64(*w));
    }
    Ok(out)
}

/// Mass of the first two coordinates binned on a `bins x bins` grid over
/// the bounding box of the support.
pub fn heatmap(mu: &EmpiricalMeasure, bins: usize) -> Result<Vec<Vec<f64>>> {
    if mu.dim() < 2 || bins == 0 {
        return Err(Error::InvalidParameter("heatmap needs a measure of dim >= 2 and bins >= 1".into()));
    }
    let range = |c: usize| {
        let (lo, hi) = mu.points().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p[c]), h.max(p[c])));
        (lo, if hi > lo { hi } else { lo + 1.0 })
    };
    let (rx, ry) = (range(0), range(1));
    let idx = |v: f64, (lo, hi): (f64, f64)| (((v - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1);
    let mut mass = vec![vec![0.0; bins]; bins];
    for (p, w) in mu.points().zip(mu.weights()) {
        mass[idx(p[0], rx)][idx(p[1], ry)] += w;
    }
    Ok(mass)
}

fn heatmap_table(mu: &EmpiricalMeasure, bins: usize) -> Result<String> {
    let mass = heatmap(mu, bins)?;
    let mut out = String::from("ix,iy,mass\n");
    for (i, row) in mass.iter().enumerate() {
        for (j, m) in row.iter().enumerate() {
            let _ = writeln!(out, "{i},{j},{}", format_f64(*m));
        }
    }
    Ok(out)
}

/// Writes plot tables into `<run_dir>/plots` and returns their paths.
pub fn emit_plots(run_dir: &Path, opts: &PlotOptions) -> Result<Vec<PathBuf>> {
    let meta_path = require(run_dir, "metadata.json")?;
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&meta_path)?)
        .map_err(|e| Error::Parse { file: meta_path.display().to_string(), msg: e.to_string() })?;
    let labels: Vec<String> = meta
        .get("param_names")
        .and_then(|v| serde_json::from_value(v.clone()).ok())
        .ok_or_else(|| Error::Parse { file: meta_path.display().to_string(), msg: "no param_names".into() })?;
    let series = TimeSeries::read_csv(&require(run_dir, "data_series.csv")?)?;
    let delay = EmpiricalMeasure::read_csv(&require(run_dir, "delay_measure.csv")?)?;

    let out_dir = run_dir.join("plots");
    std::fs::create_dir_all(&out_dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> Result<()> {
        let p = out_dir.join(name);
        std::fs::write(&p, text)?;
        written.push(p);
        Ok(())
    };
    put("series.csv", series_table(&series))?;
    if delay.dim() >= 2 {
        put("delay_projection.csv", projection_table(&delay, opts.coords.0, opts.coords.1)?)?;
        put("delay_heatmap.csv", heatmap_table(&delay, opts.bins)?)?;
    }
    if let Some(p) = optional(run_dir, "state_measure.csv") {
        let states = EmpiricalMeasure::read_csv(&p)?;
        if states.dim() >= 2 {
            put("state_projection.csv", projection_table(&states, 0, 1)?)?;
            put("state_heatmap.csv", heatmap_table(&states, opts.bins)?)?;
        }
    }
    if let Some(p) = optional(run_dir, "landscape.csv") {
        put("landscape.csv", std::fs::read_to_string(p)?)?;
    }
    if let Some(p) = optional(run_dir, "restarts.json") {
        let restarts: Vec<OptResult> = serde_json::from_str(&std::fs::read_to_string(&p)?)
            .map_err(|e| Error::Parse { file: p.display().to_string(), msg: e.to_string() })?;
        put("trace.csv", trace_table(&restarts, &labels))?;
    }
    Ok(written)
}
