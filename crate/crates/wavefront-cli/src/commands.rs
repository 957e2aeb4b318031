//! The five subcommands.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use wavefront::diagnostics::{
    single_front_report, spreading_speed_estimate, ConvergenceReport, EnvelopeConstants, SpreadingEstimate,
};
use wavefront::model::BirthFunction;
use wavefront::profile::{
    c_star_sweep, minimal_front, solve_profile, Grid, ProfileOutcome, SpeedBracket, TailFit, WaveProfile,
};
use wavefront::scenarios::{run_scenario, Scenario, Settings, VerifyOptions};
use wavefront::simulator::{make_initial_datum, run, DatumParams, DelayedField, Observer};
use wavefront::spectral::{decay_rates, lambda3, minimal_linear_speed};

use crate::config::{ConfigError, RunConfig};
use crate::output::*;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad input; exit code 2.
    Validation(String),
    /// Computation or scenario failure; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.0)
    }
}

impl From<wavefront::Error> for CliError {
    fn from(e: wavefront::Error) -> Self {
        use wavefront::Error as E;
        match e {
            E::InvalidParameter(m) => CliError::Validation(m),
            E::UnknownPreset(_) | E::HypothesisFailed(_) | E::NoSimpleRoots { .. } | E::GridTooNarrow { .. } => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<Box<dyn std::error::Error>> for CliError {
    fn from(e: Box<dyn std::error::Error>) -> Self {
        CliError::Failure(format!("output error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn out_path(cfg: &RunConfig, name: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::Failure(format!("cannot create {}: {e}", cfg.out_dir.display())))?;
    Ok(cfg.out_dir.join(name))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub c: f64,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub lambda3: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub model: String,
    pub h: f64,
    pub kappa: f64,
    pub gp0: f64,
    pub gpk: f64,
    pub c_sharp: f64,
    pub lambda_double: f64,
    pub rates: Vec<RateRow>,
}

pub fn spectrum(cfg: &RunConfig) -> CliResult<SpectrumReport> {
    let g = cfg.validate()?;
    let s = minimal_linear_speed(g.gp0, cfg.h)?;
    let rates = cfg
        .spectrum
        .speeds
        .iter()
        .map(|&c| {
            let d = decay_rates(c, g.gp0, cfg.h).ok();
            RateRow {
                c,
                lambda1: d.map(|d| d.lambda1),
                lambda2: d.map(|d| d.lambda2),
                lambda3: lambda3(c, g.gpk, cfg.h).ok(),
            }
        })
        .collect();
    let report = SpectrumReport {
        model: g.name.clone(),
        h: cfg.h,
        kappa: g.kappa,
        gp0: g.gp0,
        gpk: g.gpk,
        c_sharp: s.c_sharp,
        lambda_double: s.lambda_double,
        rates,
    };
    write_json(&out_path(cfg, "spectrum.json")?, &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub model: String,
    pub h: f64,
    pub c: f64,
    pub c_sharp: f64,
    pub kind: Option<String>,
    pub fitted_rate: Option<f64>,
    pub bracket: Option<SpeedBracket>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub lambda3: Option<f64>,
    pub tail_left: Option<TailFit>,
    pub tail_right: Option<TailFit>,
    pub residual: f64,
    pub normalized: bool,
    pub grid: Grid,
}

/// Kind name, fitted left rate and speed bracket of a minimal front.
type Class = (String, f64, SpeedBracket);

fn solve_front(cfg: &RunConfig, g: &BirthFunction) -> CliResult<(WaveProfile, Option<Class>)> {
    let opts = cfg.profile.options();
    match cfg.profile.speed {
        Some(c) => match solve_profile(c, cfg.h, g, &opts)? {
            ProfileOutcome::Front(p) => Ok((p, None)),
            ProfileOutcome::NoFront => Err(CliError::Failure(format!("no monotone front at c = {c}"))),
        },
        None => {
            let m = minimal_front(cfg.h, g, &opts)?;
            let class = (kind_name(m.class.kind).to_string(), m.class.fitted_rate, m.bracket);
            Ok((m.profile, Some(class)))
        }
    }
}

pub fn profile(cfg: &RunConfig) -> CliResult<ProfileMeta> {
    let g = cfg.validate()?;
    let (p, class) = solve_front(cfg, &g)?;
    let rates = decay_rates(p.c, g.gp0, cfg.h).ok();
    let meta = ProfileMeta {
        model: g.name.clone(),
        h: cfg.h,
        c: p.c,
        c_sharp: minimal_linear_speed(g.gp0, cfg.h)?.c_sharp,
        kind: class.as_ref().map(|c| c.0.clone()),
        fitted_rate: class.as_ref().map(|c| c.1),
        bracket: class.map(|c| c.2),
        lambda1: rates.map(|r| r.lambda1),
        lambda2: rates.map(|r| r.lambda2),
        lambda3: lambda3(p.c, g.gpk, cfg.h).ok(),
        tail_left: p.tail_left,
        tail_right: p.tail_right,
        residual: p.residual,
        normalized: p.normalized,
        grid: p.grid,
    };
    write_csv(&out_path(cfg, "profile.csv")?, &profile_rows(&p))?;
    write_json(&out_path(cfg, "profile.json")?, &meta)?;
    Ok(meta)
}

pub fn speed_sweep(cfg: &RunConfig) -> CliResult<Vec<SweepRecord>> {
    let g = cfg.validate()?;
    let opts = cfg.profile.options();
    let rows: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = cfg
            .sweep
            .h_values
            .iter()
            .map(|&h| {
                let g = &g;
                s.spawn(move || c_star_sweep(&[h], g, &opts))
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker")).collect()
    });
    let records = sweep_records(&rows);
    write_csv(&out_path(cfg, "sweep.csv")?, &records)?;
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontSummary {
    pub c: f64,
    pub lambda: f64,
    pub report: ConvergenceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub model: String,
    pub h: f64,
    pub dt: f64,
    pub dx: f64,
    pub t_final: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub datum: DatumParams,
    pub snapshots: usize,
    pub spreading: Vec<Option<SpreadingEstimate>>,
    pub front: Option<FrontSummary>,
}

pub fn simulate(cfg: &RunConfig) -> CliResult<SimulationSummary> {
    let g = cfg.validate()?;
    cfg.validate_simulation(&g)?;
    let s = &cfg.simulation;
    let d = &cfg.diagnostics;
    let dt = cfg.dt(&g);
    let phi = match s.datum {
        DatumParams::PerturbedProfile { .. } => Some(solve_front(cfg, &g)?.0),
        _ => None,
    };
    let lambda = phi.as_ref().map(|p| cfg.lambda(&g, p.c)).transpose()?;
    let grid = Grid::span(-s.half_width, s.half_width, s.dx);
    let datum = make_initial_datum(&s.datum, phi.as_ref(), g.kappa, grid, cfg.h, dt)?;
    let mut field = DelayedField::new(&datum, &g)?;
    let mut observers = vec![Observer::Snapshots {
        every: d.snapshot_every,
    }];
    observers.extend(d.points.iter().map(|&x| Observer::Point { x, every: d.point_every }));
    observers.extend(d.levels.iter().map(|&l| Observer::LevelSet {
        level: l * g.kappa,
        every: d.level_every,
    }));
    let log = run(&mut field, &g, s.t_final, &observers)?;
    let spreading = log
        .level_sets
        .iter()
        .map(|l| spreading_speed_estimate(&l.samples, d.discard).ok())
        .collect();
    let front = match (&phi, lambda) {
        (Some(p), Some(lambda)) => Some(FrontSummary {
            c: p.c,
            lambda,
            report: single_front_report(&log, p, lambda, p.c)?,
        }),
        _ => None,
    };
    let summary = SimulationSummary {
        model: g.name.clone(),
        h: cfg.h,
        dt,
        dx: grid.step,
        t_final: s.t_final,
        x_min: grid.start,
        x_max: grid.end(),
        datum: s.datum.clone(),
        snapshots: log.snapshots.len(),
        spreading,
        front,
    };
    write_csv(&out_path(cfg, "snapshots.csv")?, &snapshot_rows(&log))?;
    write_csv(&out_path(cfg, "points.csv")?, &point_rows(&log))?;
    write_csv(&out_path(cfg, "levels.csv")?, &level_rows(&log))?;
    write_json(&out_path(cfg, "simulation.json")?, &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRecord {
    pub name: String,
    pub passed: bool,
    pub measured: Option<f64>,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub scenario: String,
    pub model: String,
    pub passed: bool,
    pub settings: Settings,
    pub c_star: f64,
    pub lambda: f64,
    pub criteria: Vec<CriterionRecord>,
    pub report: Option<ConvergenceReport>,
    pub constants: Option<EnvelopeConstants>,
}

pub fn verify(cfg: &RunConfig, name: &str, h: Option<f64>) -> CliResult<VerifySummary> {
    let scenario: Scenario = name.parse()?;
    let g = cfg.validate()?;
    let opts = VerifyOptions {
        h: h.or(cfg.verify.h),
        ..cfg.verify
    };
    let out = run_scenario(scenario, &g, &opts)?;
    let summary = VerifySummary {
        scenario: scenario.to_string(),
        model: out.preset.clone(),
        passed: out.passed(),
        settings: out.settings,
        c_star: out.c_star,
        lambda: out.lambda,
        criteria: out
            .criteria
            .iter()
            .map(|c| CriterionRecord {
                name: c.name.clone(),
                passed: c.passed,
                measured: c.measured.is_finite().then_some(c.measured),
                threshold: c.threshold,
                detail: c.detail.clone(),
            })
            .collect(),
        report: out.report.clone(),
        constants: out.constants,
    };
    write_json(&out_path(cfg, &format!("verify-{scenario}.json"))?, &summary)?;
    Ok(summary)
}

