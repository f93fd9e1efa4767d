//! Synthetic world for closed-loop testing: tracks, a camera renderer, a
//! labeled sample generator, and the sense/decide/step loop.

mod episode;
mod render;
mod samples;
mod track;

pub use episode::{
    calibrate_signature, run_episode, run_episode_with, EpisodeLog, EpisodeSettings, Method, Outcome, StepRecord,
};
pub use render::{render_view, CameraModel, DEFAULT_AXIS_COLUMN};
pub use samples::{generate_samples, BLACK_ANCHOR, DEFAULT_SAMPLE_NOISE, DEFAULT_SCENARIOS, WHITE_ANCHOR};
pub use track::{cross_track_error, Point, TrackSpec, BLACK, DEFAULT_LINE_WIDTH_M, RED, WHITE};
