//! Traveling-front profiles, minimal speed and front classification.

mod operator;
mod solve;

pub use operator::{profile_operator_apply, required_half_width, Closure, Grid, Operator, Weights};
pub use solve::{
    c_star_sweep, classify_front, default_half_width, minimal_front, minimal_speed,
    minimal_speed_bracket, probe, refine_pushed_speed, solve_profile, tail_fit, FrontClass,
    FrontKind, MatchedRate, MinimalFront, Probe, ProfileOptions, ProfileOutcome, Side,
    SpeedBracket, SweepRow, TailFit, WaveProfile, TAIL_WINDOW,
};
