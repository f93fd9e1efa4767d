use std::fmt;

use super::render::{render_view, CameraModel};
use super::track::TrackSpec;
use crate::colortrack::{learn_signature, track_frame, ColorSignature, Rect, TrackerConfig};
use crate::control::{decide, decide_from_regions, line_center, scan_row, DecisionConfig, StepCommand};
use crate::error::{Error, Result};
use crate::gait::{apply_step, GaitParams, RobotPose};
use crate::imagecore::PixelBuffer;
use crate::segmentation::{otsu_segment, rule_segment, ThresholdRule};

/// Which perception pipeline turns a frame into a line center.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Otsu,
    RgbRule(ThresholdRule),
    HsvTrack { signatures: Vec<ColorSignature>, config: TrackerConfig },
}

impl Method {
    pub const NAMES: [&'static str; 3] = ["otsu", "rgb-rule", "hsv-track"];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Otsu => "otsu",
            Method::RgbRule(_) => "rgb-rule",
            Method::HsvTrack { .. } => "hsv-track",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Method::HsvTrack { signatures, .. } if signatures.is_empty() => {
                Err(Error::Config("hsv-track needs at least one signature".into()))
            }
            Method::HsvTrack { config, .. } if config.noise_min_run == 0 => {
                Err(Error::Config("noise_min_run must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Line center and command for one frame. Threshold pipelines read a
    /// single scan row; the tracking pipeline uses the biggest region.
    pub fn perceive(&self, frame: &PixelBuffer, cfg: &DecisionConfig) -> Result<(Option<usize>, StepCommand)> {
        let width = frame.width();
        let center = match self {
            Method::Otsu => {
                let (mask, _) = otsu_segment(frame)?;
                line_center(&mask, scan_row(frame.height(), cfg))?
            }
            Method::RgbRule(rule) => {
                let mask = rule_segment(frame, rule)?;
                line_center(&mask, scan_row(frame.height(), cfg))?
            }
            Method::HsvTrack { signatures, config } => {
                let regions = track_frame(frame, signatures, *config)?;
                return Ok((regions.first().map(|r| r.x_center), decide_from_regions(&regions, width, cfg)));
            }
        };
        Ok((center, decide(center, width, cfg)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    Lost,
    MaxSteps,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Completed => "COMPLETED",
            Outcome::Lost => "LOST",
            Outcome::MaxSteps => "MAX_STEPS",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// One sense/decide cycle: the pose the frame was taken from, the command
/// chosen, and the line center it was based on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub pose: RobotPose,
    pub command: StepCommand,
    pub center: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome,
    pub distance_along_track_m: f64,
    pub final_pose: RobotPose,
}

impl fmt::Display for EpisodeLog {
    /// `step pose_x pose_y heading_deg command center` per step, then
    /// `outcome <OUTCOME> distance <m>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            let center = s.center.map_or_else(|| "-".to_string(), |c| c.to_string());
            writeln!(
                f,
                "{i} {:.6} {:.6} {:.3} {} {center}",
                s.pose.x,
                s.pose.y,
                s.pose.heading.to_degrees(),
                s.command
            )?;
        }
        writeln!(f, "outcome {} distance {:.6}", self.outcome, self.distance_along_track_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeSettings {
    pub max_steps: usize,
    /// Consecutive STOP commands after which the robot is declared lost.
    pub stop_limit: usize,
    pub seed: u64,
}

impl Default for EpisodeSettings {
    fn default() -> Self {
        Self { max_steps: 2000, stop_limit: 10, seed: 0 }
    }
}

/// Runs the closed loop from the track's start pose.
///
/// The episode is COMPLETED once the arc length of the nearest track point
/// comes within one step length of the track's end. While rendering, the
/// last segment is drawn past the finish far enough to stay in view, so the
/// robot does not lose the line just before it arrives.
pub fn run_episode(
    track: &TrackSpec,
    cam: &CameraModel,
    method: &Method,
    cfg: &DecisionConfig,
    gait: &GaitParams,
    settings: EpisodeSettings,
) -> Result<EpisodeLog> {
    run_episode_with(track, cam, method, cfg, gait, settings, |_, _| Ok(()))
}

/// [`run_episode`] with a callback receiving each rendered frame.
pub fn run_episode_with(
    track: &TrackSpec,
    cam: &CameraModel,
    method: &Method,
    cfg: &DecisionConfig,
    gait: &GaitParams,
    settings: EpisodeSettings,
    mut on_frame: impl FnMut(usize, &PixelBuffer) -> Result<()>,
) -> Result<EpisodeLog> {
    track.validate()?;
    method.validate()?;
    cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
    if settings.stop_limit == 0 {
        return Err(Error::Config("stop_limit must be at least 1".into()));
    }

    let drawn = track.extended(cam.reach());
    let finish = track.length() - gait.step_length_m;
    let mut pose = track.start_pose();
    let mut steps = Vec::new();
    let mut outcome = Outcome::MaxSteps;
    let mut stops = 0;

    for i in 0..settings.max_steps {
        let frame = render_view(&drawn, &pose, cam, frame_seed(settings.seed, i));
        on_frame(i, &frame)?;
        let (center, command) = method.perceive(&frame, cfg)?;
        steps.push(StepRecord { pose, command, center });

        if command == StepCommand::Stop {
            stops += 1;
            if stops >= settings.stop_limit {
                outcome = Outcome::Lost;
                break;
            }
            continue;
        }
        stops = 0;
        pose = apply_step(pose, command, gait);
        if track.nearest((pose.x, pose.y)).1 >= finish {
            outcome = Outcome::Completed;
            break;
        }
    }

    Ok(EpisodeLog {
        steps,
        outcome,
        distance_along_track_m: track.nearest((pose.x, pose.y)).1,
        final_pose: pose,
    })
}

fn frame_seed(seed: u64, step: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ step as u64
}

/// Learns a signature from a central patch of the view at the start pose,
/// the way a user would select the line on a preview image.
pub fn calibrate_signature(track: &TrackSpec, cam: &CameraModel, id: u8, q_levels: u8) -> Result<ColorSignature> {
    let frame = render_view(track, &track.start_pose(), cam, 0);
    let side = (track.line_width_m / cam.meters_per_pixel() / 2.0).floor().max(1.0) as usize;
    let rect = Rect {
        x: (cam.axis_column as usize).saturating_sub(side / 2).min(cam.image_width - side),
        y: (cam.image_height - side) / 2,
        width: side,
        height: side,
    };
    learn_signature(&frame, rect, id, q_levels)
}
