use serde::{Deserialize, Serialize};

use super::weighted::eta;
use crate::error::{Error, Result};
use crate::model::{holder_delta, BirthFunction};
use crate::numeric::bisect;
use crate::profile::WaveProfile;
use crate::simulator::{ObservationLog, Snapshot};
use crate::spectral::decay_rates;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConstants {
    pub delta: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub q0_plus: f64,
    pub q0_minus: f64,
    pub c_shift: f64,
    pub z0: f64,
    pub z1: f64,
    pub z2: f64,
    /// Smallest sampled value of the left side of the exponential inequality.
    pub c1a_margin: f64,
    pub lambda: f64,
    pub c: f64,
    pub h: f64,
}

fn c1a_margin(g: &BirthFunction, c: f64, h: f64, lambda: f64, gamma: f64, delta: f64) -> f64 {
    let n = 200;
    let base = -lambda * lambda + c * lambda + 1.0 - gamma;
    let e = (-lambda * c * h + gamma * h).exp();
    (0..=n)
        .map(|i| {
            let s = delta * i as f64 / n as f64;
            base - g.derivative(s) * e
        })
        .fold(f64::INFINITY, f64::min)
}

/// `1 + (g(u − e^{γh} q) − g(u))/q > 2γ` near `κ`.
fn step_one_holds(g: &BirthFunction, h: f64, gamma: f64, delta: f64, sigma: f64) -> bool {
    let k = g.kappa;
    let e = (gamma * h).exp();
    let (nu, nq) = (40, 40);
    for i in 0..=nu {
        let u = k - delta + 2.0 * delta * i as f64 / nu as f64;
        if 1.0 - e * g.derivative(u) <= 2.0 * gamma {
            return false;
        }
        for j in 1..=nq {
            let q = sigma * j as f64 / nq as f64;
            if 1.0 + (g.evaluate(u - e * q) - g.evaluate(u)) / q <= 2.0 * gamma {
                return false;
            }
        }
    }
    true
}

fn profile_root<F: Fn(f64) -> f64>(phi: &WaveProfile, f: F) -> Result<f64> {
    let lo = phi.grid.start - 200.0;
    let hi = phi.grid.end() + 200.0;
    bisect(f, lo, hi, 1e-12)
}

/// Constructive constants of the upper/lower envelopes for the front `phi`.
pub fn lemma1_constants(
    g: &BirthFunction,
    phi: &WaveProfile,
    c: f64,
    h: f64,
    lambda: f64,
    sigma: f64,
) -> Result<EnvelopeConstants> {
    let rates = decay_rates(c, g.gp0, h)?;
    if !(lambda > rates.lambda1 && lambda < rates.lambda2) {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} outside ({}, {})",
            rates.lambda1, rates.lambda2
        )));
    }
    let k = g.kappa;
    if !(sigma > 0.0 && sigma < k) {
        return Err(Error::InvalidParameter("sigma must lie in (0, kappa)".into()));
    }
    let gamma_hat = c * lambda;
    let d0 = holder_delta(k);
    for i in 2..=30 {
        let delta = k / 2f64.powi(i);
        if !(delta < k / 2.0 && delta < sigma && delta < d0) {
            continue;
        }
        let z1 = match profile_root(phi, |z| phi.eval(z) + 0.25 * delta * eta(z, lambda) - 0.5 * delta) {
            Ok(z) => z,
            Err(_) => continue,
        };
        let z2 = profile_root(phi, |z| phi.eval(z) - (k - 0.5 * delta))?;
        if !(z1 < -c * h && 0.0 < z2) {
            continue;
        }
        for j in 1..=40 {
            let gamma = gamma_hat / 2f64.powi(j);
            let margin = c1a_margin(g, c, h, lambda, gamma, delta);
            if margin <= 0.0 || !step_one_holds(g, h, gamma, delta, sigma) {
                continue;
            }
            let z0 = profile_root(phi, |z| phi.eval(z) - 0.25 * delta)?;
            let beta = min_slope(phi, z0, z2 + c * h);
            if !(beta > 0.0) {
                return Err(Error::Indeterminate("profile is flat on [z0, z2 + ch]".into()));
            }
            let eh = (gamma * h).exp();
            let alpha = (gamma + eh * g.lipschitz) / beta;
            return Ok(EnvelopeConstants {
                delta,
                gamma,
                alpha,
                beta,
                q0_plus: delta / eh / 2.0,
                q0_minus: sigma,
                c_shift: alpha * eh / gamma,
                z0,
                z1,
                z2,
                c1a_margin: margin,
                lambda,
                c,
                h,
            });
        }
    }
    Err(Error::Indeterminate("no admissible (delta, gamma) in the search lattice".into()))
}

/// Discrete minimum of `Δφ/Δz` over cells meeting `[a, b]`.
fn min_slope(phi: &WaveProfile, a: f64, b: f64) -> f64 {
    let g = &phi.grid;
    let i0 = (((a - g.start) / g.step).floor().max(0.0)) as usize;
    let i1 = ((((b - g.start) / g.step).ceil()) as usize).min(g.len - 1);
    (i0..i1)
        .map(|i| (phi.values[i + 1] - phi.values[i]) / g.step)
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: f64,
    pub z: f64,
    pub margin: f64,
}

pub const ENVELOPE_SLACK: f64 = 1e-8;

/// Frame values `(z, w)` of a snapshot: `z = x + ct`.
fn frame_points<'a>(snap: &'a Snapshot, log: &'a ObservationLog, c: f64) -> impl Iterator<Item = (f64, f64)> + 'a {
    let grid = log.grid.expect("log without grid");
    snap.values
        .iter()
        .enumerate()
        .map(move |(i, &v)| (grid.node(i) + c * snap.t, v))
}

/// Checks the hypothesis on the initial history, then the envelope at every observation.
pub fn envelope_check(
    log: &ObservationLog,
    phi: &WaveProfile,
    k: &EnvelopeConstants,
    q: f64,
    direction: Direction,
) -> Result<Vec<Violation>> {
    let lam = k.lambda;
    let c = k.c;
    let kappa = phi.kappa;
    let cap = match direction {
        Direction::Upper => k.q0_plus,
        Direction::Lower => k.q0_minus,
    };
    if !(q > 0.0 && q <= cap) {
        return Err(Error::InvalidParameter(format!("q = {q} outside (0, {cap}]")));
    }
    for snap in &log.initial_history {
        for (z, w) in frame_points(snap, log, c) {
            let m = match direction {
                Direction::Upper => (phi.eval(z) + q * eta(z, lam) - w).min(w),
                Direction::Lower => (w - phi.eval(z) + q * eta(z, lam)).min(kappa - w),
            };
            if m < -ENVELOPE_SLACK {
                return Err(Error::HypothesisViolated { t: snap.t, z, margin: m });
            }
        }
    }
    let shift = k.c_shift * q;
    let mut out = Vec::new();
    for snap in log.initial_history.iter().chain(&log.snapshots) {
        let decay = q * (-k.gamma * snap.t.max(0.0)).exp();
        for (z, w) in frame_points(snap, log, c) {
            let m = match direction {
                Direction::Upper => phi.eval(z + shift) + decay * eta(z, lam) - w,
                Direction::Lower => w - phi.eval(z - shift) + decay * eta(z, lam),
            };
            if m < -ENVELOPE_SLACK {
                out.push(Violation { t: snap.t, z, margin: m });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichFit {
    pub zeta1: f64,
}

fn sandwich_margin(
    snap: &Snapshot,
    log: &ObservationLog,
    phi: &WaveProfile,
    k: &EnvelopeConstants,
    zeta: f64,
) -> (f64, f64) {
    let decay = (-k.gamma * snap.t.max(0.0)).exp();
    let lam = k.lambda;
    let mut worst = (f64::INFINITY, 0.0);
    for (z, w) in frame_points(snap, log, k.c) {
        let lower = w - (phi.eval(z - zeta) - k.q0_minus * decay * eta(z, lam));
        let upper = phi.eval(z + zeta) + k.q0_plus * decay * eta(z + zeta, lam) - w;
        let m = lower.min(upper);
        if m < worst.0 {
            worst = (m, z);
        }
    }
    worst
}

/// Smallest `ζ₁` for which the initial history lies in the two-sided envelope.
pub fn sandwich_fit(log: &ObservationLog, phi: &WaveProfile, k: &EnvelopeConstants) -> Result<SandwichFit> {
    let ok = |zeta: f64| {
        log.initial_history
            .iter()
            .all(|s| sandwich_margin(s, log, phi, k, zeta).0 >= 0.0)
    };
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::Indeterminate("initial history outside every sandwich".into()));
        }
    }
    let mut lo = 0.0;
    if ok(lo) {
        return Ok(SandwichFit { zeta1: 0.0 });
    }
    while hi - lo > 1e-6 {
        let m = 0.5 * (lo + hi);
        if ok(m) {
            hi = m;
        } else {
            lo = m;
        }
    }
    Ok(SandwichFit { zeta1: hi })
}

pub fn sandwich_check(
    log: &ObservationLog,
    phi: &WaveProfile,
    k: &EnvelopeConstants,
    fit: &SandwichFit,
) -> Vec<Violation> {
    log.snapshots
        .iter()
        .filter_map(|s| {
            let (m, z) = sandwich_margin(s, log, phi, k, fit.zeta1);
            (m < -ENVELOPE_SLACK).then_some(Violation { t: s.t, z, margin: m })
        })
        .collect()
}

/// Lower envelope `φ(−|x| + ct − z′) − K e^{−γt} η(−|x| + ct − z″)` for two-sided spreading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VEnvelope {
    pub onset: f64,
    pub z_prime: f64,
    pub z_second: f64,
    pub k: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub c: f64,
}

fn v_margin(snap: &Snapshot, log: &ObservationLog, phi: &WaveProfile, v: &VEnvelope) -> (f64, f64) {
    let grid = log.grid.expect("log without grid");
    let decay = v.k * (-v.gamma * snap.t).exp();
    let mut worst = (f64::INFINITY, 0.0);
    for (i, &u) in snap.values.iter().enumerate() {
        let x = grid.node(i);
        let a = -x.abs() + v.c * snap.t;
        let m = u - (phi.eval(a - v.z_prime) - decay * eta(a - v.z_second, v.lambda));
        if m < worst.0 {
            worst = (m, x);
        }
    }
    worst
}

/// Fits `z′ = z″` at the first snapshot past `onset` with `K = k_factor·κ·e^{γ t₁}`.
pub fn v_envelope_fit(
    log: &ObservationLog,
    phi: &WaveProfile,
    c: f64,
    lambda: f64,
    gamma: f64,
    onset: f64,
    k_factor: f64,
) -> Result<VEnvelope> {
    let snap = log
        .snapshots
        .iter()
        .find(|s| s.t >= onset)
        .ok_or_else(|| Error::InvalidParameter("no snapshot after onset".into()))?;
    let mut v = VEnvelope {
        onset: snap.t,
        z_prime: 0.0,
        z_second: 0.0,
        k: k_factor * phi.kappa * (gamma * snap.t).exp(),
        gamma,
        lambda,
        c,
    };
    let ok = |z: f64, v: &mut VEnvelope| {
        v.z_prime = z;
        v.z_second = z;
        v_margin(snap, log, phi, v).0 >= 0.0
    };
    let mut lo = -1e3;
    let mut hi = 0.0;
    while !ok(hi, &mut v) {
        lo = hi;
        hi += 10.0;
        if hi > 1e4 {
            return Err(Error::Indeterminate("no lower V envelope fits at onset".into()));
        }
    }
    if ok(lo, &mut v) {
        return Err(Error::Indeterminate("V envelope fit unbounded".into()));
    }
    while hi - lo > 1e-6 {
        let m = 0.5 * (lo + hi);
        if ok(m, &mut v) {
            hi = m;
        } else {
            lo = m;
        }
    }
    v.z_prime = hi;
    v.z_second = hi;
    Ok(v)
}

pub fn v_envelope_check(log: &ObservationLog, phi: &WaveProfile, v: &VEnvelope) -> Vec<Violation> {
    log.snapshots
        .iter()
        .filter(|s| s.t >= v.onset)
        .filter_map(|s| {
            let (m, x) = v_margin(s, log, phi, v);
            (m < -ENVELOPE_SLACK).then_some(Violation { t: s.t, z: x, margin: m })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Grid;

    fn logistic() -> WaveProfile {
        let grid = Grid::symmetric(40.0, 0.01);
        let values = grid.nodes().iter().map(|z| 1.0 / (1.0 + (-0.6 * z).exp())).collect();
        WaveProfile {
            c: 1.0,
            h: 0.0,
            kappa: 1.0,
            grid,
            values,
            tail_left: None,
            tail_right: None,
            normalized: true,
            residual: 0.0,
            closure_left: 0.6,
            closure_right: 0.6,
        }
    }

    fn constants(c_shift: f64) -> EnvelopeConstants {
        EnvelopeConstants {
            delta: 0.1,
            gamma: 0.1,
            alpha: 1.0,
            beta: 0.1,
            q0_plus: 0.05,
            q0_minus: 0.25,
            c_shift,
            z0: -5.0,
            z1: -3.0,
            z2: 5.0,
            c1a_margin: 0.1,
            lambda: 0.4,
            c: 1.0,
            h: 0.0,
        }
    }

    fn log_of<F: Fn(f64, f64) -> f64>(phi: &WaveProfile, times: &[f64], w: F) -> ObservationLog {
        let grid = Grid::symmetric(30.0, 0.1);
        let snap = |t: f64| Snapshot {
            t,
            values: grid.nodes().iter().map(|&x| w(t, x + phi.c * t)).collect(),
        };
        ObservationLog {
            grid: Some(grid),
            dt: 0.1,
            h: 0.0,
            initial_history: vec![snap(0.0)],
            snapshots: times.iter().map(|&t| snap(t)).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn exact_front_has_no_violations() {
        let phi = logistic();
        let log = log_of(&phi, &[1.0, 5.0, 20.0], |_, z| phi.eval(z));
        let k = constants(2.0);
        for d in [Direction::Upper, Direction::Lower] {
            assert!(envelope_check(&log, &phi, &k, 1e-3, d).unwrap().is_empty());
        }
    }

    #[test]
    fn constructed_breach_is_reported() {
        let mut phi = logistic();
        phi.c = 0.0;
        let mut k = constants(0.0);
        k.c = 0.0;
        let q = 0.04;
        let t_bad = 5.0 / k.gamma;
        let log = log_of(&phi, &[1.0, t_bad], |t, z| {
            let a = if t < t_bad { 0.5 } else { 2.0 };
            (phi.eval(z) + a * q * eta(z, k.lambda)).min(1.0)
        });
        let v = envelope_check(&log, &phi, &k, q, Direction::Upper).unwrap();
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| x.t == t_bad && x.margin < 0.0));
    }

    #[test]
    fn hypothesis_checked_first() {
        let phi = logistic();
        let k = constants(1.0);
        let log = log_of(&phi, &[1.0], |_, z| (phi.eval(z) + 0.2 * eta(z, k.lambda)).min(1.0));
        let e = envelope_check(&log, &phi, &k, 0.01, Direction::Upper).unwrap_err();
        assert!(matches!(e, Error::HypothesisViolated { .. }));
        assert!(envelope_check(&log, &phi, &k, 0.5, Direction::Upper).is_err());
    }

    #[test]
    fn sandwich_of_shifted_front() {
        let phi = logistic();
        let k = constants(1.0);
        let log = log_of(&phi, &[1.0, 10.0], |t, z| phi.eval(z + if t == 0.0 { 1.5 } else { 0.0 }));
        let fit = sandwich_fit(&log, &phi, &k).unwrap();
        assert!(fit.zeta1 > 0.5 && fit.zeta1 <= 1.5 + 1e-6);
        assert!(sandwich_check(&log, &phi, &k, &fit).is_empty());
    }
}
