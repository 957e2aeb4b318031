use serde::{Deserialize, Serialize};

use super::operator::{Closure, Grid, Operator};
use crate::error::{Error, Result};
use crate::model::BirthFunction;
use crate::numeric::{interp_uniform, line_fit};
use crate::spectral::{decay_rates, lambda3, minimal_linear_speed, SpectralSummary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    /// Grid half-width; `None` uses `max(40, 15/λ1(c)) + ch`.
    pub half_width: Option<f64>,
    pub dz: f64,
    pub tol: f64,
    pub tol_c: f64,
    pub max_iter: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            half_width: None,
            dz: 0.05,
            tol: 1e-8,
            tol_c: 1e-4,
            max_iter: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub rate: f64,
    pub amplitude: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub c: f64,
    pub h: f64,
    pub kappa: f64,
    pub grid: Grid,
    pub values: Vec<f64>,
    pub tail_left: Option<TailFit>,
    pub tail_right: Option<TailFit>,
    pub normalized: bool,
    /// `sup |Tφ − φ|` at return.
    pub residual: f64,
    /// Exponential rates used beyond the grid.
    pub closure_left: f64,
    pub closure_right: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileOutcome {
    Front(WaveProfile),
    NoFront,
}

impl ProfileOutcome {
    pub fn front(self) -> Option<WaveProfile> {
        match self {
            ProfileOutcome::Front(p) => Some(p),
            ProfileOutcome::NoFront => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl WaveProfile {
    /// `φ(z)`, continued exponentially beyond the grid.
    pub fn eval(&self, z: f64) -> f64 {
        let g = &self.grid;
        if z < g.start {
            self.values[0] * (self.closure_left * (z - g.start)).exp()
        } else if z > g.end() {
            let d = self.kappa - self.values[g.len - 1];
            self.kappa - d * (-self.closure_right * (z - g.end())).exp()
        } else {
            interp_uniform(g.start, g.step, &self.values, z)
        }
    }

    /// One-sided difference quotient of the grid values.
    pub fn slope(&self, z: f64) -> f64 {
        let g = &self.grid;
        let p = ((z - g.start) / g.step).floor();
        if p < 0.0 {
            return self.closure_left * self.eval(z);
        }
        let i = p as usize;
        if i + 1 >= g.len {
            return self.closure_right * (self.kappa - self.eval(z));
        }
        (self.values[i + 1] - self.values[i]) / g.step
    }

    pub fn residual_with(&self, g: &BirthFunction) -> f64 {
        let op = Operator::new(self.c, self.h, self.grid.step);
        let mut out = vec![0.0; self.grid.len];
        let mut f = Vec::new();
        op.apply(
            &self.values,
            g,
            Closure::Rate(self.closure_left),
            Closure::Rate(self.closure_right),
            &mut out,
            &mut f,
        );
        sup_diff(&out, &self.values)
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn tail_fit(profile: &WaveProfile, side: Side, window: f64) -> Result<TailFit> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidParameter("window must lie in (0, 1]".into()));
    }
    let n = profile.grid.len;
    let m = ((n as f64 * window).round() as usize).clamp(2, n);
    let idx: Vec<usize> = match side {
        Side::Left => (0..m).collect(),
        Side::Right => (n - m..n).collect(),
    };
    let mut xs = Vec::with_capacity(m);
    let mut ys = Vec::with_capacity(m);
    for i in idx {
        let v = match side {
            Side::Left => profile.values[i],
            Side::Right => profile.kappa - profile.values[i],
        };
        if !(v > 0.0) {
            return Err(Error::NonpositiveLog);
        }
        xs.push(profile.grid.node(i));
        ys.push(v.ln());
    }
    let (a, b, rms, _) = line_fit(&xs, &ys);
    let rate = match side {
        Side::Left => b,
        Side::Right => -b,
    };
    Ok(TailFit {
        rate,
        amplitude: a.exp(),
        residual: rms,
    })
}

/// Fractional index of the first upward crossing of `level`.
fn crossing(phi: &[f64], level: f64) -> Option<f64> {
    for i in 0..phi.len() - 1 {
        if phi[i] < level && phi[i + 1] >= level {
            return Some(i as f64 + (level - phi[i]) / (phi[i + 1] - phi[i]));
        }
    }
    None
}

struct Work<'a> {
    op: Operator,
    g: &'a BirthFunction,
    grid: Grid,
    center: usize,
    left: f64,
    right: f64,
    out: Vec<f64>,
    f: Vec<f64>,
}

impl<'a> Work<'a> {
    fn new(c: f64, h: f64, g: &'a BirthFunction, opts: &ProfileOptions, left: f64) -> Result<Self> {
        let half = match opts.half_width {
            Some(l) => l,
            None => default_half_width(c, h, g)?,
        };
        let grid = Grid::symmetric(half, opts.dz);
        let right = -lambda3(c, g.gpk, h)?;
        Ok(Self {
            op: Operator::new(c, h, opts.dz),
            g,
            grid,
            center: grid.len / 2,
            left,
            right,
            out: vec![0.0; grid.len],
            f: Vec::with_capacity(grid.len),
        })
    }

    fn apply(&mut self, phi: &[f64]) {
        self.op.apply(
            phi,
            self.g,
            Closure::Rate(self.left),
            Closure::Rate(self.right),
            &mut self.out,
            &mut self.f,
        );
    }

    fn initial(&self, rate: f64) -> Vec<f64> {
        let k = self.g.kappa;
        (0..self.grid.len)
            .map(|i| k * (rate * (i as f64 - self.center as f64) * self.grid.step).exp().min(1.0))
            .collect()
    }

    /// `new[i] = old[i + s]`, continued by the closure rates.
    fn shift(&self, phi: &[f64], s: isize) -> Vec<f64> {
        let n = phi.len() as isize;
        let dz = self.grid.step;
        let k = self.g.kappa;
        (0..n)
            .map(|i| {
                let j = i + s;
                if j < 0 {
                    phi[0] * (self.left * j as f64 * dz).exp()
                } else if j >= n {
                    k - (k - phi[(n - 1) as usize]) * (-self.right * (j - n + 1) as f64 * dz).exp()
                } else {
                    phi[j as usize]
                }
            })
            .collect()
    }

    fn offset(&self, phi: &[f64]) -> Option<f64> {
        crossing(phi, 0.5 * self.g.kappa).map(|p| p - self.center as f64)
    }
}

pub fn default_half_width(c: f64, h: f64, g: &BirthFunction) -> Result<f64> {
    let l1 = match decay_rates(c, g.gp0, h) {
        Ok(d) => d.lambda1,
        Err(_) => minimal_linear_speed(g.gp0, h)?.lambda_double,
    };
    Ok(40f64.max(15.0 / l1) + c * h)
}

/// Discrete-consistent left rates `(λ1ᵈ, λ2ᵈ)`; both equal the minimizer of the
/// discrete multiplier when no root pair exists.
fn discrete_left_rates(c: f64, h: f64, g: &BirthFunction, dz: f64) -> (f64, f64) {
    let (lm, r) = Operator::new(c, h, dz).discrete_rates(g.gp0);
    r.unwrap_or((lm, lm))
}

/// Result of the steep-data existence probe.
#[derive(Debug, Clone)]
pub struct Probe {
    pub c: f64,
    /// Mean displacement of the `κ/2` level per iteration (z units); negative
    /// means the steep datum is invaded.
    pub drift: f64,
    pub iterations: usize,
    pub converged: bool,
    values: Vec<f64>,
}

const DRIFT_FLOOR: f64 = 1e-9;
const PROBE_BLOCK: usize = 50;
const PROBE_BURN: usize = 300;
const PROBE_CAP: usize = 8000;

impl Probe {
    pub fn front_exists(&self) -> bool {
        self.drift >= -DRIFT_FLOOR
    }
}

/// Iterates `T` from `κ·min{1, e^{λ2ᵈ z}}`, renormalizing by whole cells, and
/// measures the drift of the level set.
pub fn probe(c: f64, h: f64, g: &BirthFunction, opts: &ProfileOptions) -> Result<Probe> {
    let (_, steep) = discrete_left_rates(c, h, g, opts.dz);
    let mut w = Work::new(c, h, g, opts, steep)?;
    let mut phi = w.initial(steep);
    let mut cum: isize = 0;
    let mut block_start = 0.0;
    let mut prev_drift = f64::NAN;
    let mut drift = 0.0;
    let mut converged = false;
    let mut it = 0;
    while it < PROBE_CAP {
        w.apply(&phi);
        it += 1;
        let off = w
            .offset(&w.out)
            .ok_or_else(|| Error::Indeterminate("probe lost the level crossing".into()))?;
        let pos = off + cum as f64;
        let s = off.round() as isize;
        phi = if s != 0 { w.shift(&w.out, s) } else { w.out.clone() };
        cum += s;
        if it == PROBE_BURN - PROBE_BLOCK {
            block_start = pos;
        } else if it >= PROBE_BURN && (it - PROBE_BURN) % PROBE_BLOCK == 0 {
            drift = (pos - block_start) * opts.dz / PROBE_BLOCK as f64;
            block_start = pos;
            if (drift - prev_drift).abs() <= 1e-3 * drift.abs() + 1e-13 {
                converged = true;
                break;
            }
            prev_drift = drift;
        }
    }
    Ok(Probe {
        c,
        drift,
        iterations: it,
        converged,
        values: phi,
    })
}

/// Anderson-accelerated fixed-point solve of `φ = Tφ`; recentres by whole cells.
fn anderson(w: &mut Work, mut x: Vec<f64>, tol: f64, max_iter: usize) -> Result<(Vec<f64>, f64, usize)> {
    const M: usize = 8;
    let kappa = w.g.kappa;
    let mut dx: Vec<Vec<f64>> = Vec::new();
    let mut df: Vec<Vec<f64>> = Vec::new();
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut res = f64::INFINITY;
    for it in 0..max_iter {
        w.apply(&x);
        let fk: Vec<f64> = w.out.iter().zip(&x).map(|(t, v)| t - v).collect();
        res = fk.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if res < tol {
            return Ok((x, res, it));
        }
        if let Some((xp, fp)) = prev.take() {
            dx.push(x.iter().zip(&xp).map(|(a, b)| a - b).collect());
            df.push(fk.iter().zip(&fp).map(|(a, b)| a - b).collect());
            if dx.len() > M {
                dx.remove(0);
                df.remove(0);
            }
        }
        let gamma = least_squares(&df, &fk);
        let mut next: Vec<f64> = x.iter().zip(&fk).map(|(a, b)| a + b).collect();
        for (j, gj) in gamma.iter().enumerate() {
            for i in 0..next.len() {
                next[i] -= gj * (dx[j][i] + df[j][i]);
            }
        }
        for v in next.iter_mut() {
            *v = v.clamp(0.0, kappa);
        }
        prev = Some((x, fk));
        if let Some(off) = w.offset(&next) {
            if off.abs() > 20.0 {
                next = w.shift(&next, off.round() as isize);
                dx.clear();
                df.clear();
                prev = None;
            }
        } else {
            return Err(Error::Indeterminate("iterate lost the level crossing".into()));
        }
        x = next;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: res,
    })
}

/// Least squares `min |F γ − f|` by modified Gram–Schmidt; drops dependent columns.
fn least_squares(cols: &[Vec<f64>], f: &[f64]) -> Vec<f64> {
    let m = cols.len();
    if m == 0 {
        return Vec::new();
    }
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut r = vec![vec![0.0; m]; m];
    let mut keep = vec![false; m];
    let scale = cols.iter().map(|c| norm(c)).fold(0.0, f64::max);
    for j in 0..m {
        let mut v = cols[j].clone();
        for (k, qk) in q.iter().enumerate() {
            let idx = qidx(&keep, k);
            let d = dot(qk, &v);
            r[idx][j] = d;
            for (vi, qi) in v.iter_mut().zip(qk) {
                *vi -= d * qi;
            }
        }
        let nv = norm(&v);
        if nv > 1e-10 * scale {
            for vi in v.iter_mut() {
                *vi /= nv;
            }
            r[j][j] = nv;
            keep[j] = true;
            q.push(v);
        }
    }
    let cols_kept: Vec<usize> = (0..m).filter(|&j| keep[j]).collect();
    let rhs: Vec<f64> = q.iter().map(|qk| dot(qk, f)).collect();
    let mut gamma = vec![0.0; m];
    for a in (0..cols_kept.len()).rev() {
        let j = cols_kept[a];
        let mut s = rhs[a];
        for &l in &cols_kept[a + 1..] {
            s -= r[j][l] * gamma[l];
        }
        gamma[j] = s / r[j][j];
    }
    gamma
}

/// Column index of the `k`-th kept basis vector.
fn qidx(keep: &[bool], k: usize) -> usize {
    keep.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .nth(k)
        .map(|(i, _)| i)
        .unwrap()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Anderson solve followed by whole-cell recentring and relabelling of the origin.
fn polish(w: &mut Work, x: Vec<f64>, opts: &ProfileOptions) -> Result<WaveProfile> {
    let mut x = x;
    let mut res = f64::INFINITY;
    for _ in 0..4 {
        let (y, r, _) = anderson(w, x, opts.tol, opts.max_iter)?;
        res = r;
        let off = w
            .offset(&y)
            .ok_or_else(|| Error::Indeterminate("no level crossing".into()))?;
        let s = off.round() as isize;
        if s == 0 {
            x = y;
            break;
        }
        x = w.shift(&y, s);
        w.apply(&x);
        res = sup_diff(&w.out, &x);
        if res < opts.tol {
            break;
        }
    }
    if !(res < opts.tol) {
        return Err(Error::NonConvergence {
            iterations: opts.max_iter,
            residual: res,
        });
    }
    let off = w.offset(&x).unwrap();
    let mut grid = w.grid;
    grid.start = -(w.center as f64 + off) * grid.step;
    let mut p = WaveProfile {
        c: w.op.c,
        h: w.op.h,
        kappa: w.g.kappa,
        grid,
        values: x,
        tail_left: None,
        tail_right: None,
        normalized: true,
        residual: res,
        closure_left: w.left,
        closure_right: w.right,
    };
    p.tail_left = tail_fit(&p, Side::Left, TAIL_WINDOW).ok();
    p.tail_right = tail_fit(&p, Side::Right, TAIL_WINDOW).ok();
    Ok(p)
}

pub const TAIL_WINDOW: f64 = 0.25;

fn check_inputs(c: f64, h: f64, g: &BirthFunction) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter("c must be positive".into()));
    }
    if !(h >= 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter("h must be nonnegative".into()));
    }
    if !g.monotone {
        return Err(Error::InvalidParameter("birth function must be monotone on [0, kappa]".into()));
    }
    Ok(())
}

/// Front at speed `c`, if one exists; non-minimal fronts carry the slow tail.
pub fn solve_profile(
    c: f64,
    h: f64,
    g: &BirthFunction,
    opts: &ProfileOptions,
) -> Result<ProfileOutcome> {
    check_inputs(c, h, g)?;
    let spec = minimal_linear_speed(g.gp0, h)?;
    if c <= spec.c_sharp {
        return Ok(ProfileOutcome::NoFront);
    }
    if !probe(c, h, g, opts)?.front_exists() {
        return Ok(ProfileOutcome::NoFront);
    }
    let (slow, _) = discrete_left_rates(c, h, g, opts.dz);
    let mut w = Work::new(c, h, g, opts, slow)?;
    let x0 = w.initial(slow);
    polish(&mut w, x0, opts).map(ProfileOutcome::Front)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedBracket {
    pub lo: f64,
    pub hi: f64,
    /// Probe drifts at the ends; `None` where the end was decided spectrally.
    pub drift_lo: Option<f64>,
    pub drift_hi: f64,
}

impl SpeedBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

pub fn minimal_speed_bracket(h: f64, g: &BirthFunction, opts: &ProfileOptions) -> Result<SpeedBracket> {
    check_inputs(1.0, h, g)?;
    let spec = minimal_linear_speed(g.gp0, h)?;
    let mut lo = spec.c_sharp;
    let mut hi = spec.c_sharp + 5.0;
    let top = probe(hi, h, g, opts)?;
    if !top.front_exists() {
        return Err(Error::Indeterminate(format!("no front at c_hi = {hi}")));
    }
    let mut drift_hi = top.drift;
    let mut drift_lo = None;
    while hi - lo >= opts.tol_c {
        let mid = 0.5 * (lo + hi);
        let p = probe(mid, h, g, opts)?;
        if p.front_exists() {
            hi = mid;
            drift_hi = p.drift;
        } else {
            lo = mid;
            drift_lo = Some(p.drift);
        }
    }
    Ok(SpeedBracket {
        lo,
        hi,
        drift_lo,
        drift_hi,
    })
}

pub fn minimal_speed(h: f64, g: &BirthFunction, opts: &ProfileOptions) -> Result<f64> {
    minimal_speed_bracket(h, g, opts).map(|b| b.midpoint())
}

/// Zero of the probe drift inside the bracket (Illinois regula falsi).
pub fn refine_pushed_speed(
    h: f64,
    g: &BirthFunction,
    opts: &ProfileOptions,
    bracket: &SpeedBracket,
) -> Result<Probe> {
    let mut a = bracket.lo;
    let mut fa = bracket
        .drift_lo
        .ok_or_else(|| Error::Indeterminate("lower end has no drift".into()))?;
    let mut b = bracket.hi;
    let mut fb = bracket.drift_hi;
    let mut side = 0i32;
    let mut best: Option<Probe> = None;
    for _ in 0..40 {
        let c = (a * fb - b * fa) / (fb - fa);
        let p = probe(c, h, g, opts)?;
        let fc = p.drift;
        let done = fc.abs() < 1e-12 || (b - a).abs() < 1e-13;
        best = Some(p);
        if done {
            break;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    best.ok_or_else(|| Error::Indeterminate("refinement produced no probe".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalFront {
    /// Bisection midpoint.
    pub c_star: f64,
    pub bracket: SpeedBracket,
    pub class: FrontClass,
    /// Profile at the refined speed (pushed) or at `c_star` (pulled).
    pub profile: WaveProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrontKind {
    Pushed,
    PulledMinimal,
    NonMinimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchedRate {
    Lambda1,
    Lambda2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontClass {
    pub kind: FrontKind,
    pub c_star: f64,
    pub c_sharp: f64,
    pub fitted_rate: f64,
    pub matched_lambda: MatchedRate,
}

pub const TAIL_RESIDUAL_MAX: f64 = 0.05;

pub fn classify_front(
    profile: &WaveProfile,
    spec: &SpectralSummary,
    c_star: f64,
    tol_c: f64,
) -> Result<FrontClass> {
    let fit = tail_fit(profile, Side::Left, TAIL_WINDOW)?;
    let margin = 10.0 * tol_c;
    let class = |kind, matched| FrontClass {
        kind,
        c_star,
        c_sharp: spec.c_sharp,
        fitted_rate: fit.rate,
        matched_lambda: matched,
    };
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    if profile.c > c_star + margin {
        let d = decay_rates(profile.c, spec.gp0, spec.h)?;
        if fit.residual <= TAIL_RESIDUAL_MAX && rel(fit.rate, d.lambda1) <= 0.05 {
            return Ok(class(FrontKind::NonMinimal, MatchedRate::Lambda1));
        }
        return Err(Error::Indeterminate(format!(
            "tail rate {} does not match lambda1 = {}",
            fit.rate, d.lambda1
        )));
    }
    if (c_star - spec.c_sharp).abs() <= margin {
        return Ok(class(FrontKind::PulledMinimal, MatchedRate::Lambda1));
    }
    if c_star > spec.c_sharp + margin {
        let d = decay_rates(c_star, spec.gp0, spec.h)?;
        if fit.residual <= TAIL_RESIDUAL_MAX && rel(fit.rate, d.lambda2) <= 0.05 {
            return Ok(class(FrontKind::Pushed, MatchedRate::Lambda2));
        }
        return Err(Error::Indeterminate(format!(
            "tail rate {} (residual {}) does not match lambda2 = {}",
            fit.rate, fit.residual, d.lambda2
        )));
    }
    Err(Error::Indeterminate(format!(
        "c_star = {c_star} lies below c_sharp = {}",
        spec.c_sharp
    )))
}

/// Minimal speed by bisection, then the minimal front and its class.
pub fn minimal_front(h: f64, g: &BirthFunction, opts: &ProfileOptions) -> Result<MinimalFront> {
    let bracket = minimal_speed_bracket(h, g, opts)?;
    let c_star = bracket.midpoint();
    let spec = SpectralSummary::new(g.gp0, g.gpk, h)?;
    let pushed = c_star > spec.c_sharp + 10.0 * opts.tol_c && bracket.drift_lo.is_some();
    let profile = if pushed {
        let p = refine_pushed_speed(h, g, opts, &bracket)?;
        let (_, steep) = discrete_left_rates(p.c, h, g, opts.dz);
        let mut w = Work::new(p.c, h, g, opts, steep)?;
        polish(&mut w, p.values, opts)?
    } else {
        let (slow, _) = discrete_left_rates(c_star, h, g, opts.dz);
        let mut w = Work::new(c_star, h, g, opts, slow)?;
        let x0 = w.initial(slow);
        polish(&mut w, x0, opts)?
    };
    let class = classify_front(&profile, &spec, c_star, opts.tol_c)?;
    Ok(MinimalFront {
        c_star,
        bracket,
        class,
        profile,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: f64,
    pub c_sharp: Option<f64>,
    pub c_star: Option<f64>,
    pub kind: Option<FrontKind>,
    pub note: Option<String>,
}

pub fn c_star_sweep(h_values: &[f64], g: &BirthFunction, opts: &ProfileOptions) -> Vec<SweepRow> {
    h_values
        .iter()
        .map(|&h| {
            let c_sharp = minimal_linear_speed(g.gp0, h).ok().map(|s| s.c_sharp);
            match minimal_front(h, g, opts) {
                Ok(m) => SweepRow {
                    h,
                    c_sharp,
                    c_star: Some(m.c_star),
                    kind: Some(m.class.kind),
                    note: None,
                },
                Err(e) => SweepRow {
                    h,
                    c_sharp,
                    c_star: minimal_speed(h, g, opts).ok(),
                    kind: None,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect()
}
