use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("birth function rejected: failing check `{0}`")]
    HypothesisFailed(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no simple positive roots: c = {c} does not exceed c_# = {c_sharp}")]
    NoSimpleRoots { c: f64, c_sharp: f64 },
    #[error("root bracketing failed: {0}")]
    Bracket(String),
    #[error("iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("grid too narrow: half-width {have} below required L = {required}")]
    GridTooNarrow { have: f64, required: f64 },
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("nonpositive log argument in fit window")]
    NonpositiveLog,
    #[error("insufficient samples: need {need}, have {have}")]
    InsufficientSamples { need: usize, have: usize },
    #[error("scheme instability at t = {t}: overshoot {overshoot:e}; reduce dt")]
    Instability { t: f64, overshoot: f64 },
    #[error("no level crossing at {0}")]
    NoCrossing(f64),
    #[error("minimizer at search boundary (s = {0})")]
    SearchBoundary(f64),
    #[error("shift exceeds domain margin: {0}")]
    ShiftOutOfDomain(f64),
    #[error("envelope hypothesis violated at t = {t}, z = {z} (margin {margin:e})")]
    HypothesisViolated { t: f64, z: f64, margin: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
