//! Method-of-steps solver: backward Euler for `u_xx − u`, explicit delayed reaction.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{eta, level_set_position};
use crate::error::{Error, Result};
use crate::model::BirthFunction;
use crate::numeric::interp_uniform;
use crate::profile::{Grid, Side, WaveProfile};

impl Grid {
    /// Nodes `a, a + dx, …` up to `b` (rounded to whole cells).
    pub fn span(a: f64, b: f64, dx: f64) -> Self {
        let cells = ((b - a) / dx).round() as usize;
        Self {
            start: a,
            step: dx,
            len: cells + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatumParams {
    /// `κ·min{1, e^{μ(x − B)}}`.
    FrontLike { mu: f64, b: f64, sigma: f64 },
    /// `κ·[x ≥ 0]`.
    Heaviside { mu: f64, sigma: f64 },
    /// `height·cos²(π(x − center)/(2w))` on `|x − center| < w`.
    CompactBump {
        center: f64,
        half_width: f64,
        height: f64,
        mu: f64,
    },
    /// `φ(x + cs + s₀) + ε η(x + cs) ψ(x + cs)` with `|ψ| ≤ 1` drawn from `seed`.
    PerturbedProfile {
        s0: f64,
        eps: f64,
        lambda: f64,
        sigma: f64,
        seed: u64,
    },
}

/// Constants declared for the admissibility conditions on the datum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Declared {
    pub a: Option<f64>,
    pub mu: Option<f64>,
    pub b: Option<f64>,
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDatum {
    pub params: DatumParams,
    pub kappa: f64,
    pub grid: Grid,
    pub h: f64,
    pub dt: f64,
    pub declared: Declared,
    /// Samples at `s = −h, −h + dt, …, 0`.
    pub history: Vec<Vec<f64>>,
    pub boundary: (f64, f64),
}

/// Bounded perturbation pattern `ψ` with `|ψ| ≤ 1`.
#[derive(Debug, Clone)]
pub struct Pattern {
    modes: Vec<(f64, f64, f64)>,
    norm: f64,
}

impl Pattern {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| {
                (
                    rng.gen_range(0.5..1.0),
                    rng.gen_range(0.2..1.5),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        let norm = modes.iter().map(|m| m.0).sum();
        Self { modes, norm }
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.modes.iter().map(|(a, w, p)| a * (w * z + p).sin()).sum::<f64>() / self.norm
    }
}

/// Steps per delay `h/dt`; `dt` must divide `h`.
pub fn lag_steps(h: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter("dt must be positive".into()));
    }
    if !(h >= 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter("h must be nonnegative".into()));
    }
    let m = (h / dt).round();
    if (m * dt - h).abs() > 1e-9 * h.max(dt) {
        return Err(Error::InvalidParameter(format!("dt = {dt} does not divide h = {h}")));
    }
    Ok(m as usize)
}

/// Largest step allowed by default: `min(h/⌈h/0.01⌉, 0.9/L_g)` (`0.01` for `h = 0`).
pub fn default_dt(h: f64, lipschitz: f64) -> f64 {
    let base = if h > 0.0 { h / (h / 0.01).ceil() } else { 0.01 };
    if base <= 0.9 / lipschitz {
        base
    } else if h > 0.0 {
        h / (h * lipschitz / 0.9).ceil()
    } else {
        0.9 / lipschitz
    }
}

pub fn make_initial_datum(
    params: &DatumParams,
    profile: Option<&WaveProfile>,
    kappa: f64,
    grid: Grid,
    h: f64,
    dt: f64,
) -> Result<InitialDatum> {
    let m = lag_steps(h, dt)?;
    let xs = grid.nodes();
    let bad = |s: &str| Err(Error::InvalidParameter(s.into()));
    let (sample, declared, boundary): (Box<dyn Fn(f64, f64) -> f64>, Declared, (f64, f64)) = match params {
        DatumParams::FrontLike { mu, b, sigma } => {
            if !(*mu > 0.0) || !(*sigma > 0.0 && *sigma < kappa) {
                return bad("front_like needs mu > 0 and sigma in (0, kappa)");
            }
            let (mu, b) = (*mu, *b);
            (
                Box::new(move |_s, x| kappa * (mu * (x - b)).exp().min(1.0)),
                Declared {
                    a: Some(kappa * (-mu * b).exp()),
                    mu: Some(mu),
                    b: Some(b),
                    sigma: Some(*sigma),
                },
                (0.0, kappa),
            )
        }
        DatumParams::Heaviside { mu, sigma } => {
            if !(*mu > 0.0) || !(*sigma > 0.0 && *sigma < kappa) {
                return bad("heaviside needs mu > 0 and sigma in (0, kappa)");
            }
            (
                Box::new(move |_s, x| if x >= 0.0 { kappa } else { 0.0 }),
                Declared {
                    a: Some(kappa),
                    mu: Some(*mu),
                    b: Some(0.0),
                    sigma: Some(*sigma),
                },
                (0.0, kappa),
            )
        }
        DatumParams::CompactBump {
            center,
            half_width,
            height,
            mu,
        } => {
            if !(*half_width > 0.0) || !(*height > 0.0 && *height <= kappa) || !(*mu > 0.0) {
                return bad("compact_bump needs half_width > 0, 0 < height <= kappa, mu > 0");
            }
            let (x0, w, a) = (*center, *half_width, *height);
            (
                Box::new(move |_s, x| {
                    let r = (x - x0) / w;
                    if r.abs() < 1.0 {
                        let c = (0.5 * std::f64::consts::PI * r).cos();
                        a * c * c
                    } else {
                        0.0
                    }
                }),
                Declared {
                    a: Some(a * (mu * (w - x0)).exp()),
                    mu: Some(*mu),
                    b: None,
                    sigma: None,
                },
                (0.0, 0.0),
            )
        }
        DatumParams::PerturbedProfile {
            s0,
            eps,
            lambda,
            sigma,
            seed,
        } => {
            let phi = match profile {
                Some(p) => p.clone(),
                None => return bad("perturbed_profile needs a wave profile"),
            };
            if !(*eps >= 0.0) || !(*lambda > 0.0) || !(*sigma > 0.0 && *sigma < kappa) {
                return bad("perturbed_profile needs eps >= 0, lambda > 0, sigma in (0, kappa)");
            }
            let pat = Pattern::new(*seed);
            let (s0, eps, lam, c) = (*s0, *eps, *lambda, phi.c);
            let f = move |s: f64, x: f64| {
                let z = x + c * s;
                (phi.eval(z + s0) + eps * eta(z, lam) * pat.eval(z)).clamp(0.0, kappa)
            };
            (
                Box::new(f),
                Declared {
                    a: None,
                    mu: Some(lam),
                    b: None,
                    sigma: Some(*sigma),
                },
                (0.0, kappa),
            )
        }
    };
    let history: Vec<Vec<f64>> = (0..=m)
        .map(|k| {
            let s = -h + k as f64 * dt;
            xs.iter().map(|&x| sample(s, x)).collect()
        })
        .collect();
    let mut declared = declared;
    if let DatumParams::PerturbedProfile { .. } = params {
        // tightest constants the samples admit
        let mu = declared.mu.unwrap();
        let mut a: f64 = 0.0;
        for snap in &history {
            for (x, v) in xs.iter().zip(snap) {
                a = a.max(v * (-mu * x).exp());
            }
        }
        declared.a = Some(a * (1.0 + 1e-9));
        let sigma = declared.sigma.unwrap();
        let mut b = f64::NEG_INFINITY;
        for snap in &history {
            if let Some(i) = (0..xs.len()).rev().find(|&i| snap[i] <= kappa - sigma) {
                b = b.max(xs[(i + 1).min(xs.len() - 1)]);
            } else {
                b = b.max(xs[0]);
            }
        }
        declared.b = Some(b);
    }
    Ok(InitialDatum {
        params: params.clone(),
        kappa,
        grid,
        h,
        dt,
        declared,
        history,
        boundary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcReport {
    pub ic1: bool,
    pub ic2: bool,
    pub ic3: bool,
    pub notes: Vec<String>,
}

pub fn validate_ic(datum: &InitialDatum, lambda1_cstar: f64) -> IcReport {
    let k = datum.kappa;
    let xs = datum.grid.nodes();
    let mut notes = Vec::new();
    let ic1 = datum
        .history
        .iter()
        .all(|s| s.iter().all(|&v| (0.0..=k).contains(&v)));
    if !ic1 {
        notes.push("values leave [0, kappa]".into());
    }
    let d = datum.declared;
    let ic2 = match (d.a, d.mu) {
        (Some(a), Some(mu)) => {
            let slow = mu <= lambda1_cstar;
            if slow {
                notes.push(format!("mu = {mu} does not exceed lambda1 = {lambda1_cstar}"));
            }
            let bound = datum.history.iter().all(|s| {
                xs.iter()
                    .zip(s)
                    .all(|(x, v)| *v <= a * (mu * x).exp() * (1.0 + 1e-12))
            });
            if !bound {
                notes.push("datum exceeds A e^{mu x}".into());
            }
            !slow && bound
        }
        _ => {
            notes.push("no (A, mu) declared".into());
            false
        }
    };
    let ic3 = match (d.b, d.sigma) {
        (Some(b), Some(sigma)) => datum.history.iter().all(|s| {
            xs.iter()
                .zip(s)
                .filter(|(x, _)| **x >= b)
                .all(|(_, v)| *v > k - sigma)
        }),
        _ => {
            notes.push("no right plateau declared".into());
            false
        }
    };
    IcReport {
        ic1,
        ic2,
        ic3,
        notes,
    }
}

/// Constant-coefficient tridiagonal factorization for interior nodes.
#[derive(Debug, Clone)]
struct Thomas {
    off: f64,
    cp: Vec<f64>,
    inv: Vec<f64>,
}

impl Thomas {
    fn new(n: usize, diag: f64, off: f64) -> Self {
        let mut cp = vec![0.0; n];
        let mut inv = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let den = diag - off * prev;
            inv[i] = 1.0 / den;
            cp[i] = off * inv[i];
            prev = cp[i];
        }
        Self { off, cp, inv }
    }

    /// Solves in place; `off` multiplies both neighbours.
    fn solve(&self, d: &mut [f64]) {
        let n = d.len();
        d[0] *= self.inv[0];
        for i in 1..n {
            d[i] = (d[i] - self.off * d[i - 1]) * self.inv[i];
        }
        for i in (0..n - 1).rev() {
            d[i] -= self.cp[i] * d[i + 1];
        }
    }
}

#[derive(Debug, Clone)]
pub struct DelayedField {
    pub grid: Grid,
    pub dt: f64,
    pub h: f64,
    pub lag: usize,
    pub kappa: f64,
    pub t_now: f64,
    pub steps: u64,
    pub boundary: (f64, f64),
    history: VecDeque<Vec<f64>>,
    solver: Thomas,
    r: f64,
    rhs: Vec<f64>,
}

impl DelayedField {
    pub fn new(datum: &InitialDatum, g: &BirthFunction) -> Result<Self> {
        let lag = lag_steps(datum.h, datum.dt)?;
        if datum.dt * g.lipschitz > 0.9 * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "dt = {} exceeds 0.9/L_g = {}",
                datum.dt,
                0.9 / g.lipschitz
            )));
        }
        if datum.grid.len < 3 {
            return Err(Error::InvalidParameter("grid needs at least 3 nodes".into()));
        }
        for b in [datum.boundary.0, datum.boundary.1] {
            if (g.evaluate(b) - b).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("boundary value {b} is not an equilibrium")));
            }
        }
        let r = datum.dt / (datum.grid.step * datum.grid.step);
        let n = datum.grid.len;
        let mut history: VecDeque<Vec<f64>> = datum.history.iter().cloned().collect();
        for s in history.iter_mut() {
            s[0] = datum.boundary.0;
            s[n - 1] = datum.boundary.1;
        }
        Ok(Self {
            grid: datum.grid,
            dt: datum.dt,
            h: datum.h,
            lag,
            kappa: g.kappa,
            t_now: 0.0,
            steps: 0,
            boundary: datum.boundary,
            history,
            solver: Thomas::new(n - 2, 1.0 + datum.dt + 2.0 * r, -r),
            r,
            rhs: vec![0.0; n - 2],
        })
    }

    pub fn current(&self) -> &[f64] {
        self.history.back().unwrap()
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    /// Advances by one step of length `dt`.
    pub fn step(&mut self, g: &BirthFunction) -> Result<()> {
        let n = self.grid.len;
        let dt = self.dt;
        {
            let lagged = self.history.front().unwrap();
            let cur = self.history.back().unwrap();
            for i in 1..n - 1 {
                self.rhs[i - 1] = cur[i] + dt * g.evaluate(lagged[i]);
            }
        }
        self.rhs[0] += self.r * self.boundary.0;
        self.rhs[n - 3] += self.r * self.boundary.1;
        self.solver.solve(&mut self.rhs);
        let mut next = if self.history.len() > self.lag {
            self.history.pop_front().unwrap()
        } else {
            vec![0.0; n]
        };
        let k = self.kappa;
        let t = self.t_now + dt;
        for i in 1..n - 1 {
            let v = self.rhs[i - 1];
            if v < 0.0 || v > k {
                let over = if v < 0.0 { -v } else { v - k };
                if over >= 1e-10 {
                    return Err(Error::Instability { t, overshoot: over });
                }
                next[i] = v.clamp(0.0, k);
            } else {
                next[i] = v;
            }
        }
        next[0] = self.boundary.0;
        next[n - 1] = self.boundary.1;
        self.history.push_back(next);
        self.steps += 1;
        self.t_now = self.steps as f64 * dt;
        Ok(())
    }

    /// `u(t, x)` by linear interpolation.
    pub fn value_at(&self, x: f64) -> f64 {
        interp_uniform(self.grid.start, self.grid.step, self.current(), x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observer {
    Snapshots { every: f64 },
    Point { x: f64, every: f64 },
    LevelSet { level: f64, every: f64 },
}

impl Observer {
    fn every(&self) -> f64 {
        match self {
            Observer::Snapshots { every } | Observer::Point { every, .. } | Observer::LevelSet { every, .. } => *every,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSeries {
    pub x: f64,
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSample {
    pub t: f64,
    pub left: Option<f64>,
    pub right: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSeries {
    pub level: f64,
    pub samples: Vec<LevelSample>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ObservationLog {
    pub grid: Option<Grid>,
    pub dt: f64,
    pub h: f64,
    /// History at `s ∈ [−h, 0]` as the run started.
    pub initial_history: Vec<Snapshot>,
    pub snapshots: Vec<Snapshot>,
    pub points: Vec<PointSeries>,
    pub level_sets: Vec<LevelSeries>,
}

/// Advances to `t_final`, recording observations at their cadences.
pub fn run(
    field: &mut DelayedField,
    g: &BirthFunction,
    t_final: f64,
    observers: &[Observer],
) -> Result<ObservationLog> {
    if !(t_final >= field.t_now) {
        return Err(Error::InvalidParameter("T must not precede the current time".into()));
    }
    let span = t_final - field.t_now;
    let steps = (span / field.dt).round();
    if (steps * field.dt - span).abs() > 1e-9 * span.max(1.0) {
        return Err(Error::InvalidParameter(format!("dt = {} does not divide T", field.dt)));
    }
    let mut cadence = Vec::with_capacity(observers.len());
    for o in observers {
        let every = o.every();
        let k = (every / field.dt).round();
        if !(k >= 1.0) || (k * field.dt - every).abs() > 1e-9 * every {
            return Err(Error::InvalidParameter(format!(
                "dt = {} does not divide observer cadence {every}",
                field.dt
            )));
        }
        cadence.push(k as u64);
    }
    let mut log = ObservationLog {
        grid: Some(field.grid),
        dt: field.dt,
        h: field.h,
        initial_history: field
            .history
            .iter()
            .enumerate()
            .map(|(i, v)| Snapshot {
                t: field.t_now - (field.history.len() - 1 - i) as f64 * field.dt,
                values: v.clone(),
            })
            .collect(),
        ..Default::default()
    };
    for o in observers {
        match o {
            Observer::Point { x, .. } => log.points.push(PointSeries {
                x: *x,
                samples: Vec::new(),
            }),
            Observer::LevelSet { level, .. } => log.level_sets.push(LevelSeries {
                level: *level,
                samples: Vec::new(),
            }),
            Observer::Snapshots { .. } => {}
        }
    }
    // cadences count steps from the run start
    let mut k = 0u64;
    let total = steps as u64;
    observe_at(field, observers, &mut log, &cadence, k);
    while k < total {
        field.step(g)?;
        k += 1;
        observe_at(field, observers, &mut log, &cadence, k);
    }
    Ok(log)
}

fn observe_at(field: &DelayedField, observers: &[Observer], log: &mut ObservationLog, cadence: &[u64], k: u64) {
    let t = field.t_now;
    let mut ip = 0;
    let mut il = 0;
    for (o, &every) in observers.iter().zip(cadence) {
        let now = k % every == 0;
        match o {
            Observer::Snapshots { .. } => {
                if now {
                    log.snapshots.push(Snapshot {
                        t,
                        values: field.current().to_vec(),
                    });
                }
            }
            Observer::Point { x, .. } => {
                if now {
                    log.points[ip].samples.push((t, field.value_at(*x)));
                }
                ip += 1;
            }
            Observer::LevelSet { level, .. } => {
                if now {
                    let u = field.current();
                    log.level_sets[il].samples.push(LevelSample {
                        t,
                        left: level_set_position(u, &field.grid, *level, Side::Left).ok(),
                        right: level_set_position(u, &field.grid, *level, Side::Right).ok(),
                    });
                }
                il += 1;
            }
        }
    }
}
