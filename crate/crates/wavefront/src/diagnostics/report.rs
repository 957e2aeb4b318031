use serde::{Deserialize, Serialize};

use super::envelope::Violation;
use super::levels::{level_set_position, SpreadingEstimate};
use super::weighted::{frame_distance, minimize_phase};
use crate::error::{Error, Result};
use crate::profile::{Side, WaveProfile};
use crate::simulator::ObservationLog;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub t: f64,
    pub phase_left: Option<f64>,
    pub phase_right: Option<f64>,
    pub dist_left: Option<f64>,
    pub dist_right: Option<f64>,
    /// `sup |κ − u|` on `|x| ≤ COMPACT_RADIUS`.
    pub sup_compact: f64,
    pub level_left: Option<f64>,
    pub level_right: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub records: Vec<FrameRecord>,
    pub spreading: Option<SpreadingEstimate>,
    pub violations: Vec<Violation>,
    pub extinct: bool,
}

pub const COMPACT_RADIUS: f64 = 10.0;

impl ConvergenceReport {
    pub fn last(&self) -> Option<&FrameRecord> {
        self.records.last()
    }

    /// Largest `dist_left`/`dist_right` over records with `t ≥ t0`.
    pub fn max_distance_after(&self, t0: f64) -> Option<f64> {
        self.records
            .iter()
            .filter(|r| r.t >= t0)
            .flat_map(|r| [r.dist_left, r.dist_right])
            .flatten()
            .fold(None, |m, d| Some(m.map_or(d, |m: f64| m.max(d))))
    }
}

/// `max − min` of the selected phase over records with `t ≥ t0`.
pub fn phase_spread(records: &[FrameRecord], t0: f64, side: Side) -> Option<f64> {
    let phases: Vec<f64> = records
        .iter()
        .filter(|r| r.t >= t0)
        .filter_map(|r| match side {
            Side::Left => r.phase_left,
            Side::Right => r.phase_right,
        })
        .collect();
    if phases.is_empty() {
        return None;
    }
    let lo = phases.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = phases.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Some(hi - lo)
}

fn sup_compact(u: &[f64], log: &ObservationLog, kappa: f64) -> f64 {
    let grid = log.grid.expect("log without grid");
    u.iter()
        .enumerate()
        .filter(|(i, _)| grid.node(*i).abs() <= COMPACT_RADIUS)
        .map(|(_, v)| (kappa - v).abs())
        .fold(0.0, f64::max)
}

/// Distance of each snapshot to `φ(x + ct + s)` with the best phase `s`.
pub fn single_front_report(log: &ObservationLog, phi: &WaveProfile, lambda: f64, c: f64) -> Result<ConvergenceReport> {
    let grid = log.grid.ok_or_else(|| Error::InvalidParameter("log without grid".into()))?;
    let half = 0.5 * phi.kappa;
    let mut out = ConvergenceReport::default();
    for snap in &log.snapshots {
        let ct = c * snap.t;
        let level = level_set_position(&snap.values, &grid, half, Side::Left).ok();
        let center = level.map_or(-ct, |x| -(x + ct));
        let (s, d) = minimize_phase(
            |s| frame_distance(&snap.values, &grid, 0..grid.len, false, phi, lambda, ct, s),
            center,
        )?;
        out.records.push(FrameRecord {
            t: snap.t,
            phase_left: Some(s),
            phase_right: None,
            dist_left: Some(d),
            dist_right: None,
            sup_compact: sup_compact(&snap.values, log, phi.kappa),
            level_left: level,
            level_right: None,
        });
    }
    Ok(out)
}

/// Left half fitted to `φ(x + ct + s)`, right half to `φ(−x + ct + s)`.
pub fn two_front_report(log: &ObservationLog, phi: &WaveProfile, lambda: f64, c: f64) -> Result<ConvergenceReport> {
    let grid = log.grid.ok_or_else(|| Error::InvalidParameter("log without grid".into()))?;
    let half = 0.5 * phi.kappa;
    let mid = grid.nodes().iter().position(|&x| x > 0.0).unwrap_or(grid.len);
    let mut out = ConvergenceReport::default();
    for snap in &log.snapshots {
        let u = &snap.values;
        let ct = c * snap.t;
        let left = level_set_position(u, &grid, half, Side::Left).ok();
        let right = level_set_position(u, &grid, half, Side::Right).ok();
        let (Some(xl), Some(xr)) = (left, right) else {
            out.extinct = u.iter().all(|&v| v < half);
            out.records.push(FrameRecord {
                t: snap.t,
                phase_left: None,
                phase_right: None,
                dist_left: None,
                dist_right: None,
                sup_compact: sup_compact(u, log, phi.kappa),
                level_left: left,
                level_right: right,
            });
            continue;
        };
        out.extinct = false;
        let (sl, dl) = minimize_phase(
            |s| frame_distance(u, &grid, 0..mid, false, phi, lambda, ct, s),
            -(xl + ct),
        )?;
        let (sr, dr) = minimize_phase(
            |s| frame_distance(u, &grid, mid..grid.len, true, phi, lambda, ct, s),
            xr - ct,
        )?;
        out.records.push(FrameRecord {
            t: snap.t,
            phase_left: Some(sl),
            phase_right: Some(sr),
            dist_left: Some(dl),
            dist_right: Some(dr),
            sup_compact: sup_compact(u, log, phi.kappa),
            level_left: left,
            level_right: right,
        });
    }
    Ok(out)
}
