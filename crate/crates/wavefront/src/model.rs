//! Birth functions `g` and the monostability hypothesis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::bisect;

/// How a birth function is specified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BirthSpec {
    Preset(String),
    Polynomial(Vec<f64>),
}

/// A polynomial `g(u) = Σ aᵢ uⁱ` on `[0, κ]`, extended linearly outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthFunction {
    pub name: String,
    pub coeffs: Vec<f64>,
    pub kappa: f64,
    pub gp0: f64,
    pub gpk: f64,
    pub lipschitz: f64,
    pub monotone: bool,
    /// `(C, θ)` with `|g′(u) − g′(0)| + |g′(κ) − g′(κ − u)| ≤ C uᶿ` near the endpoints.
    pub holder: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    pub n_samples: usize,
    /// `g(u) ≤ g′(0)u` on the samples; informational only.
    pub sub_tangential: bool,
}

impl HypothesisReport {
    pub fn failing(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }
}

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &a| acc * u + a)
}

fn deriv(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| *a * i as f64)
        .collect()
}

/// Max of `|p|` on `[a, b]`: endpoints plus roots of `p′`.
fn max_abs_on(p: &[f64], a: f64, b: f64) -> f64 {
    let mut best = horner(p, a).abs().max(horner(p, b).abs());
    let dp = deriv(p);
    if dp.iter().all(|c| *c == 0.0) {
        return best;
    }
    let n = 2000;
    let step = (b - a) / n as f64;
    let mut prev = horner(&dp, a);
    for i in 1..=n {
        let x = a + step * i as f64;
        let cur = horner(&dp, x);
        if prev == 0.0 {
            best = best.max(horner(p, x - step).abs());
        } else if prev.signum() != cur.signum() {
            if let Ok(r) = bisect(|u| horner(&dp, u), x - step, x, 1e-15) {
                best = best.max(horner(p, r).abs());
            }
        }
        prev = cur;
    }
    best
}

/// Positive roots of `g(u) − u` up to the Cauchy bound.
fn positive_fixed_points(coeffs: &[f64]) -> Vec<f64> {
    let mut p = coeffs.to_vec();
    if p.len() < 2 {
        p.resize(2, 0.0);
    }
    p[1] -= 1.0;
    while p.len() > 1 && *p.last().unwrap() == 0.0 {
        p.pop();
    }
    if p.len() < 2 {
        return Vec::new();
    }
    let lead = *p.last().unwrap();
    let bound = 1.0 + p[..p.len() - 1].iter().map(|a| (a / lead).abs()).fold(0.0, f64::max);
    let n = 200_000;
    let step = bound / n as f64;
    let f = |u: f64| horner(&p, u);
    let mut roots = Vec::new();
    let mut prev = f(step * 1e-3);
    for i in 1..=n {
        let x = step * i as f64;
        let cur = f(x);
        if cur == 0.0 {
            roots.push(x);
        } else if prev != 0.0 && prev.signum() != cur.signum() {
            if let Ok(r) = bisect(f, x - step, x, 0.0) {
                roots.push(r);
            }
        }
        prev = cur;
    }
    roots
}

impl BirthFunction {
    /// Builds from coefficients without checking the hypothesis.
    pub fn from_polynomial_unchecked(name: &str, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("polynomial coefficients must be finite and nonempty".into()));
        }
        let roots = positive_fixed_points(&coeffs);
        let kappa = *roots
            .last()
            .ok_or_else(|| Error::HypothesisFailed("positive equilibrium".into()))?;
        let dp = deriv(&coeffs);
        let gp0 = horner(&dp, 0.0);
        let gpk = horner(&dp, kappa);
        let lipschitz = max_abs_on(&dp, 0.0, kappa);
        let monotone = {
            let n = 4000;
            (0..=n).all(|i| horner(&dp, kappa * i as f64 / n as f64) >= -1e-14)
        };
        let d2 = deriv(&dp);
        let d0 = holder_delta(kappa);
        let c_h = max_abs_on(&d2, 0.0, d0) + max_abs_on(&d2, kappa - d0, kappa);
        Ok(Self {
            name: name.to_string(),
            coeffs,
            kappa,
            gp0,
            gpk,
            lipschitz,
            monotone,
            holder: (c_h * (1.0 + 1e-9), 1.0),
        })
    }

    #[inline]
    pub fn poly(&self, u: f64) -> f64 {
        horner(&self.coeffs, u)
    }

    fn poly_deriv(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for (i, a) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * u + a * i as f64;
        }
        acc
    }

    #[inline]
    pub fn evaluate(&self, u: f64) -> f64 {
        if u < 0.0 {
            self.gp0 * u
        } else if u > self.kappa {
            self.kappa + self.gpk * (u - self.kappa)
        } else {
            self.poly(u)
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        if u < 0.0 {
            self.gp0
        } else if u > self.kappa {
            self.gpk
        } else {
            self.poly_deriv(u)
        }
    }
}

/// `δ₀ = min(0.1, κ/10)`.
pub fn holder_delta(kappa: f64) -> f64 {
    (0.1f64).min(kappa / 10.0)
}

pub fn make_birth_function(spec: &BirthSpec) -> Result<BirthFunction> {
    match spec {
        BirthSpec::Preset(name) => preset(name),
        BirthSpec::Polynomial(coeffs) => {
            let g = BirthFunction::from_polynomial_unchecked("custom", coeffs.clone())?;
            let report = validate_hypothesis_h(&g, 1000);
            match report.failing().first() {
                Some(name) => Err(Error::HypothesisFailed((*name).to_string())),
                None => Ok(g),
            }
        }
    }
}

pub fn preset(name: &str) -> Result<BirthFunction> {
    match name {
        "hadeler_rothe" => Ok(BirthFunction {
            name: name.into(),
            coeffs: vec![0.0, 10.0 / 8.0, 3.0 / 8.0, -5.0 / 8.0],
            kappa: 1.0,
            gp0: 1.25,
            gpk: 0.125,
            // g″(0.2) = 0
            lipschitz: 1.325,
            monotone: true,
            // |g″| ≤ 0.75 on [0, 0.1] and ≤ 3 on [0.9, 1]
            holder: (3.75, 1.0),
        }),
        "kpp" => Ok(BirthFunction {
            name: name.into(),
            coeffs: vec![0.0, 2.0, -1.0],
            kappa: 1.0,
            gp0: 2.0,
            gpk: 0.0,
            lipschitz: 2.0,
            monotone: true,
            holder: (4.0, 1.0),
        }),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

fn record(name: &str, measured: f64, threshold: f64, passed: bool) -> CheckRecord {
    CheckRecord {
        name: name.into(),
        measured,
        threshold,
        passed,
    }
}

pub fn validate_hypothesis_h(g: &BirthFunction, n_samples: usize) -> HypothesisReport {
    let n = n_samples.max(100);
    let k = g.kappa;
    let us: Vec<f64> = (0..=n).map(|i| k * i as f64 / n as f64).collect();
    let mut checks = Vec::new();

    let fp = g.evaluate(0.0).abs().max((g.evaluate(k) - k).abs());
    checks.push(record("fixed points 0 and kappa", fp, 1e-12, fp < 1e-12));

    let interior = us[1..n]
        .iter()
        .map(|&u| g.evaluate(u) - u)
        .fold(f64::INFINITY, f64::min);
    checks.push(record("no interior fixed point", interior, 0.0, interior > 0.0));

    checks.push(record("gp0 > 1", g.gp0, 1.0, g.gp0 > 1.0));
    checks.push(record("gpk < 1", g.gpk, 1.0, g.gpk < 1.0));

    let mut lip: f64 = 0.0;
    for w in us.windows(2) {
        lip = lip.max((g.evaluate(w[1]) - g.evaluate(w[0])).abs() / (w[1] - w[0]));
    }
    for i in 0..=20 {
        for j in (i + 1)..=20 {
            let (u, v) = (k * i as f64 / 20.0, k * j as f64 / 20.0);
            lip = lip.max((g.evaluate(v) - g.evaluate(u)).abs() / (v - u));
        }
    }
    let lip_bound = g.lipschitz * (1.0 + 1e-8);
    checks.push(record("lipschitz", lip, lip_bound, lip <= lip_bound));

    if g.monotone {
        let drop = us
            .windows(2)
            .map(|w| g.evaluate(w[0]) - g.evaluate(w[1]))
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(record("monotone", drop, 0.0, drop <= 0.0));
    }

    let d0 = holder_delta(k);
    let (ch, th) = g.holder;
    let mut worst = f64::NEG_INFINITY;
    let m = 200;
    for i in 0..=m {
        let u = (1e-8f64.ln() + (d0.ln() - 1e-8f64.ln()) * i as f64 / m as f64).exp();
        let lhs = (g.derivative(u) - g.gp0).abs() + (g.gpk - g.derivative(k - u)).abs();
        worst = worst.max(lhs - ch * u.powf(th));
    }
    checks.push(record("holder", worst, 0.0, worst <= 1e-12));

    let sub_tangential = us.iter().all(|&u| g.evaluate(u) <= g.gp0 * u + 1e-15);
    let passed = checks.iter().all(|c| c.passed);
    HypothesisReport {
        passed,
        checks,
        n_samples: n,
        sub_tangential,
    }
}

pub fn equilibria(g: &BirthFunction) -> (f64, f64) {
    (0.0, g.kappa)
}
