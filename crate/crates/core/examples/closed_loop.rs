//! Drives the simulated robot around a straight line, a smooth arc and a
//! sharp corner with each perception pipeline.
//!
//! ```bash
//! cargo run --release -p linefollow --example closed_loop
//! ```

use std::time::Instant;

use linefollow::colortrack::{TrackerConfig, DEFAULT_Q_LEVELS};
use linefollow::control::{DecisionConfig, StepCommand};
use linefollow::gait::GaitParams;
use linefollow::segmentation::ThresholdRule;
use linefollow::sim::{
    calibrate_signature, cross_track_error, run_episode, CameraModel, EpisodeSettings, Method, TrackSpec, RED, WHITE,
};

fn main() -> linefollow::Result<()> {
    let cam = CameraModel::default();
    let tracks = [
        ("straight", TrackSpec::straight(1.0)?),
        ("arc", TrackSpec::arc(0.2, 0.5, 90.0)?),
        ("corner", TrackSpec::corner(0.5, 90.0)?),
    ];
    for (name, black) in &tracks {
        let red = black.clone().with_colors(RED, WHITE);
        let signature = calibrate_signature(&red, &cam, 1, DEFAULT_Q_LEVELS)?;
        let runs = [
            ("otsu", black, Method::Otsu),
            ("rgb-rule", black, Method::RgbRule(ThresholdRule::default())),
            ("hsv-track", &red, Method::HsvTrack { signatures: vec![signature], config: TrackerConfig::default() }),
        ];
        for (method_name, track, method) in runs {
            let start = Instant::now();
            let log = run_episode(
                track,
                &cam,
                &method,
                &DecisionConfig::default(),
                &GaitParams::default(),
                EpisodeSettings::default(),
            )?;
            let turns = log.steps.iter().filter(|s| matches!(s.command, StepCommand::Left | StepCommand::Right)).count();
            let worst = log.steps.iter().map(|s| cross_track_error(track, &s.pose)).fold(0.0, f64::max);
            println!(
                "{name:<9} {method_name:<10} {:<10} steps {:>4} turns {:>3} worst xte {:>6.1} mm  {:>6.2} s",
                log.outcome.name(),
                log.steps.len(),
                turns,
                worst * 1000.0,
                start.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
