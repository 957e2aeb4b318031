use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::line_fit;
use crate::profile::{Grid, Side};
use crate::simulator::LevelSample;

/// Outermost crossing of `level` on the requested side.
pub fn level_set_position(u: &[f64], grid: &Grid, level: f64, side: Side) -> Result<f64> {
    let n = u.len();
    let cross = |i: usize| {
        let (a, b) = (u[i], u[i + 1]);
        (a - level) * (b - level) <= 0.0 && a != b
    };
    let at = |i: usize| grid.node(i) + grid.step * (level - u[i]) / (u[i + 1] - u[i]);
    match side {
        Side::Left => (0..n - 1).find(|&i| cross(i)).map(at),
        Side::Right => (0..n - 1).rev().find(|&i| cross(i)).map(at),
    }
    .ok_or(Error::NoCrossing(level))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadingEstimate {
    pub c_left: Option<f64>,
    pub c_right: Option<f64>,
    pub stderr_left: Option<f64>,
    pub stderr_right: Option<f64>,
}

pub const MIN_RETAINED: usize = 10;

/// Least-squares slopes of the left/right level positions after discarding a transient.
pub fn spreading_speed_estimate(samples: &[LevelSample], discard_fraction: f64) -> Result<SpreadingEstimate> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples {
            need: MIN_RETAINED,
            have: 0,
        });
    }
    let t0 = samples[0].t;
    let t1 = samples[samples.len() - 1].t;
    let cut = t0 + discard_fraction * (t1 - t0);
    let kept: Vec<&LevelSample> = samples.iter().filter(|s| s.t >= cut).collect();
    let fit = |pick: &dyn Fn(&LevelSample) -> Option<f64>| -> Option<(f64, f64)> {
        let pts: Vec<(f64, f64)> = kept.iter().filter_map(|s| pick(s).map(|x| (s.t, x))).collect();
        if pts.len() < MIN_RETAINED {
            return None;
        }
        let (t, x): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let (_, b, _, se) = line_fit(&t, &x);
        Some((b, se))
    };
    let l = fit(&|s| s.left);
    let r = fit(&|s| s.right);
    if l.is_none() && r.is_none() {
        return Err(Error::InsufficientSamples {
            need: MIN_RETAINED,
            have: kept.len(),
        });
    }
    Ok(SpreadingEstimate {
        c_left: l.map(|v| v.0),
        c_right: r.map(|v| v.0),
        stderr_left: l.map(|v| v.1),
        stderr_right: r.map(|v| v.1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OriginFit {
    pub q: f64,
    pub nu: f64,
    pub residual: f64,
}

/// Fit `κ − u(t, 0) ≈ q e^{−νt}` on the samples after `discard_fraction`.
pub fn origin_approach_fit(samples: &[(f64, f64)], kappa: f64, discard_fraction: f64) -> Result<OriginFit> {
    let last = samples
        .last()
        .ok_or(Error::InsufficientSamples { need: 2, have: 0 })?;
    if (kappa - last.1).abs() > 1e-3 {
        return Err(Error::InvalidParameter(format!(
            "final value {} is not within 1e-3 of kappa",
            last.1
        )));
    }
    let t0 = samples[0].0;
    let cut = t0 + discard_fraction * (last.0 - t0);
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for &(t, u) in samples.iter().filter(|s| s.0 >= cut) {
        let d = kappa - u;
        if !(d > 0.0) {
            return Err(Error::NonpositiveLog);
        }
        ts.push(t);
        ys.push(d.ln());
    }
    if ts.len() < 2 {
        return Err(Error::InsufficientSamples {
            need: 2,
            have: ts.len(),
        });
    }
    let (a, b, rms, _) = line_fit(&ts, &ys);
    Ok(OriginFit {
        q: a.exp(),
        nu: -b,
        residual: rms,
    })
}
