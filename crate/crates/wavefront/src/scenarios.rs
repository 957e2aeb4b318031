//! End-to-end verification runs shared by the command line and the test suite.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    envelope_check, lemma1_constants, origin_approach_fit, phase_spread, single_front_report, spreading_speed_estimate,
    two_front_report, ConvergenceReport, Direction, EnvelopeConstants,
};
use crate::error::{Error, Result};
use crate::model::BirthFunction;
use crate::profile::{minimal_front, FrontKind, Grid, MinimalFront, ProfileOptions, Side, WaveProfile};
use crate::simulator::{make_initial_datum, run, DatumParams, DelayedField, ObservationLog, Observer};
use crate::spectral::{decay_rates, minimal_linear_speed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Stability,
    GlobalFront,
    TwoFront,
    Spreading,
    Envelope,
    OriginApproach,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Stability,
        Scenario::GlobalFront,
        Scenario::TwoFront,
        Scenario::Spreading,
        Scenario::Envelope,
        Scenario::OriginApproach,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Stability => "stability",
            Scenario::GlobalFront => "global-front",
            Scenario::TwoFront => "two-front",
            Scenario::Spreading => "spreading",
            Scenario::Envelope => "envelope",
            Scenario::OriginApproach => "origin-approach",
        }
    }

    /// Delay used when none is requested.
    pub fn default_h(&self) -> f64 {
        match self {
            Scenario::TwoFront => 0.1,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scenario {s:?}")))
    }
}

/// Overrides for the built-in scenario settings.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyOptions {
    pub h: Option<f64>,
    pub dt: Option<f64>,
    pub dx: Option<f64>,
    pub t_final: Option<f64>,
    pub dz: Option<f64>,
    /// Position of `λ` inside `(λ1, λ2)`.
    pub theta: Option<f64>,
    pub discard: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub h: f64,
    pub dt: f64,
    pub dx: f64,
    pub t_final: f64,
    pub dz: f64,
    pub theta: f64,
    pub discard: f64,
}

impl Settings {
    pub fn resolve(scenario: Scenario, o: &VerifyOptions) -> Result<Self> {
        let (dt, t_final, theta, dz) = match scenario {
            Scenario::GlobalFront => (5e-5, 120.0, 0.25, 0.0125),
            Scenario::TwoFront => (1e-4, 120.0, 0.25, 0.025),
            Scenario::Spreading => (1e-3, 120.0, 0.25, 0.025),
            Scenario::Stability | Scenario::Envelope => (2.5e-4, 40.0, 0.5, 0.025),
            Scenario::OriginApproach => (1e-3, 30.0, 0.25, 0.025),
        };
        let s = Settings {
            h: o.h.unwrap_or(scenario.default_h()),
            dt: o.dt.unwrap_or(dt),
            dx: o.dx.unwrap_or(0.1),
            t_final: o.t_final.unwrap_or(t_final),
            dz: o.dz.unwrap_or(dz),
            theta: o.theta.unwrap_or(theta),
            discard: o.discard.unwrap_or(0.3),
        };
        if !(s.h >= 0.0) || !s.h.is_finite() {
            return Err(Error::InvalidParameter("h must be nonnegative".into()));
        }
        for (name, v) in [("dt", s.dt), ("dx", s.dx), ("t_final", s.t_final), ("dz", s.dz)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if !(s.theta > 0.0 && s.theta < 1.0) {
            return Err(Error::InvalidParameter("theta must lie in (0, 1)".into()));
        }
        if !(0.0..1.0).contains(&s.discard) {
            return Err(Error::InvalidParameter("discard must lie in [0, 1)".into()));
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Criterion {
    fn below(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured < threshold,
            measured,
            threshold,
            detail: format!("{measured:.6e} < {threshold:.3e}"),
        }
    }

    fn above(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured > threshold,
            measured,
            threshold,
            detail: format!("{measured:.6e} > {threshold:.3e}"),
        }
    }

    fn relative(name: &str, measured: f64, target: f64, tol: f64) -> Self {
        let rel = (measured - target).abs() / target.abs();
        Self {
            name: name.into(),
            passed: rel <= tol,
            measured,
            threshold: tol,
            detail: format!("{measured:.6} vs {target:.6}, relative error {rel:.3e} (limit {tol})"),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub scenario: Scenario,
    pub preset: String,
    pub settings: Settings,
    pub c_star: f64,
    pub lambda: f64,
    pub criteria: Vec<Criterion>,
    pub report: Option<ConvergenceReport>,
    pub constants: Option<EnvelopeConstants>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Criterion> {
        self.criteria.iter().filter(|c| !c.passed)
    }
}

struct Front {
    min: MinimalFront,
    lambda: f64,
}

impl Front {
    fn phi(&self) -> &WaveProfile {
        &self.min.profile
    }

    fn c(&self) -> f64 {
        self.min.profile.c
    }
}

fn front(g: &BirthFunction, s: &Settings) -> Result<Front> {
    let opts = ProfileOptions {
        dz: s.dz,
        ..ProfileOptions::default()
    };
    let min = minimal_front(s.h, g, &opts)?;
    let rates = decay_rates(min.profile.c, g.gp0, s.h)?;
    let lambda = rates.lambda1 + s.theta * (rates.lambda2 - rates.lambda1);
    Ok(Front { min, lambda })
}

fn simulate(
    g: &BirthFunction,
    s: &Settings,
    params: &DatumParams,
    phi: Option<&WaveProfile>,
    grid: Grid,
    observers: &[Observer],
) -> Result<ObservationLog> {
    let datum = make_initial_datum(params, phi, g.kappa, grid, s.h, s.dt)?;
    let mut field = DelayedField::new(&datum, g)?;
    run(&mut field, g, s.t_final, observers)
}

fn outcome(scenario: Scenario, g: &BirthFunction, s: Settings, f: &Front, criteria: Vec<Criterion>) -> ScenarioOutcome {
    ScenarioOutcome {
        scenario,
        preset: g.name.clone(),
        settings: s,
        c_star: f.c(),
        lambda: f.lambda,
        criteria,
        report: None,
        constants: None,
    }
}

pub fn run_scenario(scenario: Scenario, g: &BirthFunction, opts: &VerifyOptions) -> Result<ScenarioOutcome> {
    let s = Settings::resolve(scenario, opts)?;
    match scenario {
        Scenario::GlobalFront => global_front(g, s),
        Scenario::TwoFront => two_front(g, s),
        Scenario::Spreading => spreading(g, s),
        Scenario::Stability | Scenario::Envelope => stability(scenario, g, s),
        Scenario::OriginApproach => origin_approach(g, s),
    }
}

/// Front-like datum with the front's leading rate and amplitude, started at `x = 40`.
fn global_front(g: &BirthFunction, s: Settings) -> Result<ScenarioOutcome> {
    let f = front(g, &s)?;
    let tail = f
        .phi()
        .tail_left
        .ok_or_else(|| Error::Indeterminate("front without a left tail fit".into()))?;
    let params = DatumParams::FrontLike {
        mu: tail.rate,
        b: 40.0 - tail.amplitude.ln() / tail.rate,
        sigma: 0.5 * g.kappa,
    };
    let grid = Grid::span(-150.0, 180.0, s.dx);
    let log = simulate(g, &s, &params, None, grid, &[Observer::Snapshots { every: 1.0 }])?;
    let report = single_front_report(&log, f.phi(), f.lambda, f.c())?;
    let t0 = 0.75 * s.t_final;
    let spread = phase_spread(&report.records, t0, Side::Left).unwrap_or(f64::INFINITY);
    let dist = report.last().and_then(|r| r.dist_left).unwrap_or(f64::INFINITY);
    let criteria = vec![
        Criterion::below("phase Cauchy over last quarter", spread, 1e-2),
        Criterion::below("weighted distance at T", dist, 0.02),
    ];
    let mut out = outcome(Scenario::GlobalFront, g, s, &f, criteria);
    out.report = Some(report);
    Ok(out)
}

fn two_front(g: &BirthFunction, s: Settings) -> Result<ScenarioOutcome> {
    let f = front(g, &s)?;
    let c = f.c();
    let half = c * s.t_final + 160.0;
    let grid = Grid::span(-half, half, s.dx);
    let params = DatumParams::CompactBump {
        center: 0.0,
        half_width: 10.0,
        height: g.kappa,
        mu: 1.0,
    };
    let observers = [
        Observer::Snapshots { every: 1.0 },
        Observer::LevelSet {
            level: 0.5 * g.kappa,
            every: 0.5,
        },
    ];
    let log = simulate(g, &s, &params, None, grid, &observers)?;
    let mut report = two_front_report(&log, f.phi(), f.lambda, c)?;
    let est = spreading_speed_estimate(&log.level_sets[0].samples, s.discard)?;
    report.spreading = Some(est);
    let last = report.last().copied();
    let dl = last.and_then(|r| r.dist_left).unwrap_or(f64::INFINITY);
    let dr = last.and_then(|r| r.dist_right).unwrap_or(f64::INFINITY);
    let final_u = &log.snapshots.last().expect("run records the final time").values;
    let compact = grid
        .nodes()
        .iter()
        .zip(final_u)
        .filter(|(x, _)| x.abs() <= 5.0)
        .map(|(_, u)| *u)
        .fold(f64::INFINITY, f64::min);
    let criteria = vec![
        Criterion::below("left half weighted distance at T", dl, 0.02),
        Criterion::below("right half weighted distance at T", dr, 0.02),
        Criterion::relative("left level speed", -est.c_left.unwrap_or(f64::NAN), c, 0.02),
        Criterion::relative("right level speed", est.c_right.unwrap_or(f64::NAN), c, 0.02),
        Criterion::above("min u(T, x) on [-5, 5]", compact, g.kappa - 1e-2),
    ];
    let mut out = outcome(Scenario::TwoFront, g, s, &f, criteria);
    out.report = Some(report);
    Ok(out)
}

/// Heaviside datum; the invading level set is compared with the minimal speed.
fn spreading(g: &BirthFunction, s: Settings) -> Result<ScenarioOutcome> {
    let f = front(g, &s)?;
    let target = match f.min.class.kind {
        FrontKind::PulledMinimal => minimal_linear_speed(g.gp0, s.h)?.c_sharp,
        _ => f.c(),
    };
    let grid = Grid::span(-(1.2 * target * s.t_final + 40.0), 40.0, s.dx);
    let params = DatumParams::Heaviside {
        mu: 1.0,
        sigma: 0.5 * g.kappa,
    };
    let observers = [Observer::LevelSet {
        level: 0.5 * g.kappa,
        every: 0.5,
    }];
    let log = simulate(g, &s, &params, None, grid, &observers)?;
    let est = spreading_speed_estimate(&log.level_sets[0].samples, s.discard)?;
    let criteria = vec![Criterion::relative(
        "level-set spreading speed",
        -est.c_left.unwrap_or(f64::NAN),
        target,
        0.02,
    )];
    let mut out = outcome(Scenario::Spreading, g, s, &f, criteria);
    out.report = Some(ConvergenceReport {
        spreading: Some(est),
        ..Default::default()
    });
    Ok(out)
}

pub const STABILITY_SIGMA: f64 = 0.25;
pub const STABILITY_SEED: u64 = 7;

/// Perturbed front with `ε = q0⁺/2`.
fn stability(scenario: Scenario, g: &BirthFunction, s: Settings) -> Result<ScenarioOutcome> {
    let f = front(g, &s)?;
    let sigma = STABILITY_SIGMA * g.kappa;
    let k = lemma1_constants(g, f.phi(), f.c(), s.h, f.lambda, sigma)?;
    let eps = 0.5 * k.q0_plus;
    let params = DatumParams::PerturbedProfile {
        s0: 0.0,
        eps,
        lambda: f.lambda,
        sigma,
        seed: STABILITY_SEED,
    };
    let lo = -(f.c() * s.t_final + 200.0);
    let grid = Grid::span(lo, 80.0, s.dx);
    let log = simulate(g, &s, &params, Some(f.phi()), grid, &[Observer::Snapshots { every: 0.5 }])?;
    let mut report = single_front_report(&log, f.phi(), f.lambda, f.c())?;
    let criteria = match scenario {
        Scenario::Stability => {
            let d0 = report.records[0].dist_left.unwrap_or(f64::INFINITY);
            let worst = report.max_distance_after(0.0).unwrap_or(f64::INFINITY);
            vec![Criterion::below("max weighted distance / initial", worst / d0, 3.0)]
        }
        _ => {
            let upper = envelope_check(&log, f.phi(), &k, eps, Direction::Upper)?;
            let lower = envelope_check(&log, f.phi(), &k, eps, Direction::Lower)?;
            let c = vec![
                Criterion::below("upper envelope violations", upper.len() as f64, 0.5),
                Criterion::below("lower envelope violations", lower.len() as f64, 0.5),
            ];
            report.violations = upper.into_iter().chain(lower).collect();
            c
        }
    };
    let mut out = outcome(scenario, g, s, &f, criteria);
    out.report = Some(report);
    out.constants = Some(k);
    Ok(out)
}

fn origin_approach(g: &BirthFunction, s: Settings) -> Result<ScenarioOutcome> {
    let f = front(g, &s)?;
    let grid = Grid::span(-(1.2 * f.c() * s.t_final + 40.0), 40.0, s.dx);
    let params = DatumParams::Heaviside {
        mu: 1.0,
        sigma: 0.5 * g.kappa,
    };
    let log = simulate(g, &s, &params, None, grid, &[Observer::Point { x: 0.0, every: 0.1 }])?;
    let fit = origin_approach_fit(&log.points[0].samples, g.kappa, s.discard)?;
    let criteria = vec![
        Criterion::above("approach rate nu", fit.nu, 0.0),
        Criterion::below("log-linear residual", fit.residual, 0.1),
    ];
    Ok(outcome(Scenario::OriginApproach, g, s, &f, criteria))
}
