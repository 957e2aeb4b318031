use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{golden_min, interp_uniform};
use crate::profile::{Grid, WaveProfile};
use crate::spectral::DecayPair;

/// `η(x) = min{e^{λx}, 1}`.
#[inline]
pub fn eta(x: f64, lambda: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        (lambda * x).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedFrame {
    pub lambda: f64,
    pub c: f64,
}

impl WeightedFrame {
    pub fn new(lambda: f64, c: f64, rates: &DecayPair) -> Result<Self> {
        if !(lambda > rates.lambda1 && lambda < rates.lambda2) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda} outside ({}, {})",
                rates.lambda1, rates.lambda2
            )));
        }
        Ok(Self { lambda, c })
    }

    /// `λ1 + θ(λ2 − λ1)`.
    pub fn inside(theta: f64, c: f64, rates: &DecayPair) -> Result<Self> {
        Self::new(rates.lambda1 + theta * (rates.lambda2 - rates.lambda1), c, rates)
    }

    pub fn eta(&self, x: f64) -> f64 {
        eta(x, self.lambda)
    }
}

/// `max |f(x_i)|/η(x_i)` over the grid.
pub fn weighted_norm(f: &[f64], grid: &Grid, lambda: f64) -> f64 {
    f.iter()
        .enumerate()
        .map(|(i, v)| v.abs() / eta(grid.node(i), lambda))
        .fold(0.0, f64::max)
}

/// `w(z) = u(z − ct)` sampled on `z_grid`.
pub fn moving_frame(u: &[f64], grid: &Grid, c: f64, t: f64, z_grid: &Grid) -> Result<Vec<f64>> {
    let shift = c * t;
    let lo = z_grid.start - shift;
    let hi = z_grid.end() - shift;
    let tol = 1e-9 * grid.step;
    if lo < grid.start - tol || hi > grid.end() + tol {
        return Err(Error::ShiftOutOfDomain(shift));
    }
    Ok((0..z_grid.len)
        .map(|i| interp_uniform(grid.start, grid.step, u, z_grid.node(i) - shift))
        .collect())
}

/// `max_{i ∈ idx} |u_i − φ(σ x_i + ct + s)| / η(σ x_i + ct)` with `σ = ±1`.
pub fn frame_distance(
    u: &[f64],
    grid: &Grid,
    idx: std::ops::Range<usize>,
    mirror: bool,
    phi: &WaveProfile,
    lambda: f64,
    ct: f64,
    s: f64,
) -> f64 {
    let sign = if mirror { -1.0 } else { 1.0 };
    let mut m: f64 = 0.0;
    for i in idx {
        let z = sign * grid.node(i) + ct;
        let d = (u[i] - phi.eval(z + s)).abs() / eta(z, lambda);
        m = m.max(d);
    }
    m
}

pub const PHASE_HALF_WINDOW: f64 = 20.0;

/// Coarse scan then golden-section search of `objective` on `[center ± 20]`.
pub fn minimize_phase<F: FnMut(f64) -> f64>(mut objective: F, center: f64) -> Result<(f64, f64)> {
    let a = center - PHASE_HALF_WINDOW;
    let b = center + PHASE_HALF_WINDOW;
    let n = 160;
    let h = (b - a) / n as f64;
    let mut best = (0usize, f64::INFINITY);
    for k in 0..=n {
        let v = objective(a + h * k as f64);
        if v < best.1 {
            best = (k, v);
        }
    }
    if best.0 == 0 || best.0 == n {
        return Err(Error::SearchBoundary(a + h * best.0 as f64));
    }
    let lo = a + h * (best.0 - 1) as f64;
    let (s, v) = golden_min(&mut objective, lo, lo + 2.0 * h, 1e-7);
    Ok((s, v))
}

/// `argmin_s |w − φ(· + s)|_λ` over `s ∈ [−20, 20]`.
pub fn fit_phase(w: &[f64], z_grid: &Grid, phi: &WaveProfile, lambda: f64) -> Result<f64> {
    fit_phase_around(w, z_grid, phi, lambda, 0.0)
}

pub fn fit_phase_around(w: &[f64], z_grid: &Grid, phi: &WaveProfile, lambda: f64, center: f64) -> Result<f64> {
    minimize_phase(
        |s| frame_distance(w, z_grid, 0..z_grid.len, false, phi, lambda, 0.0, s),
        center,
    )
    .map(|r| r.0)
}
