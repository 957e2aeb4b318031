//! Weighted distances, level sets, envelopes and convergence reports.

mod envelope;
mod levels;
mod report;
mod weighted;

pub use envelope::{
    envelope_check, lemma1_constants, sandwich_check, sandwich_fit, v_envelope_check, v_envelope_fit, Direction,
    EnvelopeConstants, SandwichFit, VEnvelope, Violation, ENVELOPE_SLACK,
};
pub use levels::{level_set_position, origin_approach_fit, spreading_speed_estimate, OriginFit, SpreadingEstimate, MIN_RETAINED};
pub use report::{phase_spread, single_front_report, two_front_report, ConvergenceReport, FrameRecord, COMPACT_RADIUS};
pub use weighted::{
    eta, fit_phase, fit_phase_around, frame_distance, minimize_phase, moving_frame, weighted_norm, WeightedFrame,
    PHASE_HALF_WINDOW,
};
