//! Kuramoto–Sivashinsky equation `u_t + theta (u_xx + u_xxxx) + u u_x = 0` on
//! a periodic domain, integrated with ETDRK4.
//!
//! In Fourier space the linear operator is `L(k) = theta (k^2 - k^4)` and is
//! treated exactly. The nonlinear term `-0.5 d/dx (u^2)` is evaluated
//! pseudo-spectrally with the 2/3 dealiasing rule. The phi-function
//! coefficients are averaged over 32 points on the unit circle around each
//! `L(k) dt` so that modes with `L(k) dt` near zero do not suffer
//! cancellation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{DynamicalModel, State};
use crate::error::{Error, Result};

const CONTOUR_POINTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KsConfig {
    pub theta: f64,
    pub domain_length: f64,
    pub grid_points: usize,
    /// ETDRK4 step.
    pub dt: f64,
    /// ETDRK4 steps per sampling interval.
    pub n_sub: usize,
}

impl Default for KsConfig {
    fn default() -> Self {
        Self { theta: 1.0, domain_length: 100.0, grid_points: 200, dt: 0.1, n_sub: 30 }
    }
}

pub struct KsModel {
    cfg: KsConfig,
    /// exp(L dt) and exp(L dt / 2)
    e: Vec<f64>,
    e2: Vec<f64>,
    q: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
    /// -0.5 i k, with dealiased modes zeroed
    g: Vec<Complex64>,
    keep: Vec<bool>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for KsModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KsModel").field("cfg", &self.cfg).finish_non_exhaustive()
    }
}

/// Scratch buffers for one stepping sequence.
struct Workspace {
    v: Vec<Complex64>,
    nv: Vec<Complex64>,
    a: Vec<Complex64>,
    na: Vec<Complex64>,
    b: Vec<Complex64>,
    nb: Vec<Complex64>,
    c: Vec<Complex64>,
    nc: Vec<Complex64>,
    phys: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Workspace {
    fn new(n: usize, scratch_len: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            v: z.clone(),
            nv: z.clone(),
            a: z.clone(),
            na: z.clone(),
            b: z.clone(),
            nb: z.clone(),
            c: z.clone(),
            nc: z.clone(),
            phys: z,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }
}

/// Signed mode index for FFT slot `j`; the Nyquist slot maps to zero.
fn mode_index(j: usize, n: usize) -> i64 {
    if 2 * j < n {
        j as i64
    } else if 2 * j == n {
        0
    } else {
        j as i64 - n as i64
    }
}

fn etd_coefficients(lh: f64, h: f64) -> [f64; 4] {
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for j in 0..CONTOUR_POINTS {
        let r = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64);
        let z = Complex64::new(lh, 0.0) + r;
        let ez = z.exp();
        let z2 = z * z;
        let z3 = z2 * z;
        acc[0] += ((z / 2.0).exp() - 1.0) / z;
        acc[1] += (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3;
        acc[2] += (2.0 + z + ez * (z - 2.0)) / z3;
        acc[3] += (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3;
    }
    let m = CONTOUR_POINTS as f64;
    [h * acc[0].re / m, h * acc[1].re / m, h * acc[2].re / m, h * acc[3].re / m]
}

impl KsModel {
    pub fn new(cfg: KsConfig) -> Result<Self> {
        if !(cfg.theta.is_finite() && cfg.theta > 0.0) {
            return Err(Error::InvalidParameter(format!("KS theta must be > 0, got {}", cfg.theta)));
        }
        if !(cfg.domain_length > 0.0) || !(cfg.dt > 0.0) {
            return Err(Error::InvalidParameter("KS domain_length and dt must be > 0".into()));
        }
        if cfg.grid_points < 4 || cfg.n_sub == 0 {
            return Err(Error::InvalidParameter("KS needs grid_points >= 4 and n_sub >= 1".into()));
        }
        let n = cfg.grid_points;
        let h = cfg.dt;
        let cutoff = n as i64 / 3;
        let mut e = Vec::with_capacity(n);
        let mut e2 = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        let mut f1 = Vec::with_capacity(n);
        let mut f2 = Vec::with_capacity(n);
        let mut f3 = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n);
        let mut keep = Vec::with_capacity(n);
        for j in 0..n {
            let idx = mode_index(j, n);
            let k = 2.0 * PI * idx as f64 / cfg.domain_length;
            let l = cfg.theta * (k * k - k.powi(4));
            e.push((l * h).exp());
            e2.push((l * h / 2.0).exp());
            let [cq, c1, c2, c3] = etd_coefficients(l * h, h);
            q.push(cq);
            f1.push(c1);
            f2.push(c2);
            f3.push(c3);
            let kept = idx.abs() <= cutoff && 2 * j != n;
            keep.push(kept);
            g.push(if kept { Complex64::new(0.0, -0.5 * k) } else { Complex64::new(0.0, 0.0) });
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Self { cfg, e, e2, q, f1, f2, f3, g, keep, fwd, inv })
    }

    pub fn config(&self) -> &KsConfig {
        &self.cfg
    }

    pub fn theta(&self) -> f64 {
        self.cfg.theta
    }

    /// Grid coordinates `x_j = j L / N`.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.cfg.grid_points;
        (0..n).map(|j| j as f64 * self.cfg.domain_length / n as f64).collect()
    }

    /// Samples a function on the grid.
    pub fn field_from(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.grid().into_iter().map(f).collect()
    }

    fn workspace(&self) -> Workspace {
        let s = self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len());
        Workspace::new(self.cfg.grid_points, s)
    }

    fn to_spectral(&self, u: &[f64], ws: &mut Workspace) {
        for (dst, &x) in ws.v.iter_mut().zip(u) {
            *dst = Complex64::new(x, 0.0);
        }
        self.fwd.process_with_scratch(&mut ws.v, &mut ws.scratch);
    }

    /// Inverse transform of `ws.v`; returns the real field and the largest
    /// imaginary residue.
    fn to_physical(&self, ws: &mut Workspace) -> (Vec<f64>, f64) {
        let n = self.cfg.grid_points as f64;
        ws.phys.copy_from_slice(&ws.v);
        self.inv.process_with_scratch(&mut ws.phys, &mut ws.scratch);
        let mut max_im = 0.0f64;
        let u = ws
            .phys
            .iter()
            .map(|c| {
                max_im = max_im.max((c.im / n).abs());
                c.re / n
            })
            .collect();
        (u, max_im)
    }

    /// `out = g * FFT(real(IFFT(keep * v))^2)`.
    fn nonlinear(&self, v: &[Complex64], out: &mut [Complex64], phys: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = self.cfg.grid_points as f64;
        for ((p, &vi), &k) in phys.iter_mut().zip(v).zip(&self.keep) {
            *p = if k { vi } else { Complex64::new(0.0, 0.0) };
        }
        self.inv.process_with_scratch(phys, scratch);
        for p in phys.iter_mut() {
            let u = p.re / n;
            *p = Complex64::new(u * u, 0.0);
        }
        self.fwd.process_with_scratch(phys, scratch);
        for ((o, p), g) in out.iter_mut().zip(phys.iter()).zip(&self.g) {
            *o = g * p;
        }
    }

    fn etdrk4(&self, ws: &mut Workspace) {
        let n = self.cfg.grid_points;
        let Workspace { v, nv, a, na, b, nb, c, nc, phys, scratch } = ws;
        self.nonlinear(v, nv, phys, scratch);
        for j in 0..n {
            a[j] = v[j] * self.e2[j] + nv[j] * self.q[j];
        }
        self.nonlinear(a, na, phys, scratch);
        for j in 0..n {
            b[j] = v[j] * self.e2[j] + na[j] * self.q[j];
        }
        self.nonlinear(b, nb, phys, scratch);
        for j in 0..n {
            c[j] = a[j] * self.e2[j] + (nb[j] * 2.0 - nv[j]) * self.q[j];
        }
        self.nonlinear(c, nc, phys, scratch);
        for j in 0..n {
            v[j] = v[j] * self.e[j]
                + nv[j] * self.f1[j]
                + (na[j] + nb[j]) * (2.0 * self.f2[j])
                + nc[j] * self.f3[j];
        }
    }

    fn check_spectrum(&self, ws: &Workspace) -> Result<()> {
        if ws.v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Instability { theta: self.cfg.theta, dt: self.cfg.dt });
        }
        Ok(())
    }

    fn check_field(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.cfg.grid_points {
            return Err(Error::DimensionMismatch { expected: self.cfg.grid_points, got: u.len() });
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("KS field".into()));
        }
        Ok(())
    }

    /// One ETDRK4 step of size `dt`.
    pub fn ks_step(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.ks_step_with_residue(u).map(|(u, _)| u)
    }

    /// One ETDRK4 step, also returning `max |Im|` of the inverse transform.
    pub fn ks_step_with_residue(&self, u: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.check_field(u)?;
        let mut ws = self.workspace();
        self.to_spectral(u, &mut ws);
        self.etdrk4(&mut ws);
        self.check_spectrum(&ws)?;
        Ok(self.to_physical(&mut ws))
    }

    /// Runs `n` ETDRK4 steps without leaving Fourier space.
    pub fn run_steps(&self, u: &[f64], n: usize) -> Result<Vec<f64>> {
        self.check_field(u)?;
        let mut ws = self.workspace();
        self.to_spectral(u, &mut ws);
        for _ in 0..n {
            self.etdrk4(&mut ws);
        }
        self.check_spectrum(&ws)?;
        Ok(self.to_physical(&mut ws).0)
    }
}

impl DynamicalModel for KsModel {
    fn state_dim(&self) -> usize {
        self.cfg.grid_points
    }

    fn params(&self) -> Vec<f64> {
        vec![self.cfg.theta]
    }

    fn advance(&self, x: &[f64]) -> Result<State> {
        let mut ws = self.workspace();
        self.to_spectral(x, &mut ws);
        for _ in 0..self.cfg.n_sub {
            self.etdrk4(&mut ws);
        }
        self.check_spectrum(&ws)?;
        Ok(self.to_physical(&mut ws).0)
    }
}
