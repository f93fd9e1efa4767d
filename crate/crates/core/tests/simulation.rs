use proptest::prelude::*;

use linefollow::colortrack::{build_class_matrix, learn_signature, quantize, Rect, DEFAULT_Q_LEVELS};
use linefollow::control::DecisionConfig;
use linefollow::gait::{GaitParams, RobotPose};
use linefollow::imagecore::rgb_to_hsv;
use linefollow::segmentation::ThresholdRule;
use linefollow::sim::{
    cross_track_error, render_view, run_episode, CameraModel, EpisodeSettings, Method,
    Outcome, TrackSpec, RED, WHITE,
};

fn run(track: &TrackSpec, method: &Method, settings: EpisodeSettings) -> linefollow::sim::EpisodeLog {
    run_episode(track, &CameraModel::default(), method, &DecisionConfig::default(), &GaitParams::default(), settings)
        .unwrap()
}

fn rule() -> Method {
    Method::RgbRule(ThresholdRule::default())
}

#[test]
fn straight_metre_takes_about_167_steps() {
    let log = run(&TrackSpec::straight(1.0).unwrap(), &rule(), EpisodeSettings::default());
    assert_eq!(log.outcome, Outcome::Completed);
    assert!(log.steps.len().abs_diff(167) <= 5, "{} steps", log.steps.len());
}

#[test]
fn otsu_completes_the_corner() {
    let log = run(&TrackSpec::corner(0.5, 90.0).unwrap(), &Method::Otsu, EpisodeSettings::default());
    assert_eq!(log.outcome, Outcome::Completed);
}

#[test]
fn invisible_line_is_lost_after_stop_limit() {
    let track = TrackSpec::straight(1.0).unwrap().with_colors(WHITE, WHITE);
    let settings = EpisodeSettings { stop_limit: 4, ..EpisodeSettings::default() };
    let log = run(&track, &rule(), settings);
    assert_eq!(log.outcome, Outcome::Lost);
    assert_eq!(log.steps.len(), 4);
    assert_eq!(log.final_pose, track.start_pose());
}

#[test]
fn step_budget_ends_in_max_steps() {
    let log = run(&TrackSpec::straight(1.0).unwrap(), &rule(), EpisodeSettings { max_steps: 3, ..Default::default() });
    assert_eq!(log.outcome, Outcome::MaxSteps);
    assert_eq!(log.steps.len(), 3);
}

#[test]
fn seeded_noise_is_reproducible() {
    let mut track = TrackSpec::corner(0.5, 90.0).unwrap();
    track.noise_stddev = 15.0;
    let settings = EpisodeSettings { seed: 9, ..EpisodeSettings::default() };
    let a = run(&track, &Method::Otsu, settings);
    let b = run(&track, &Method::Otsu, settings);
    assert_eq!(a, b);
    assert_eq!(a.to_string(), b.to_string());
}

#[test]
fn learned_signature_covers_the_stripe() {
    let mut track = TrackSpec::straight(1.0).unwrap().with_colors(RED, WHITE);
    track.noise_stddev = 6.0;
    let cam = CameraModel::default();
    let frame = render_view(&track, &track.start_pose(), &cam, 3);
    // 40x40 inside the 50 pixel wide stripe
    let rect = Rect { x: 131, y: 130, width: 40, height: 40 };
    let sig = learn_signature(&frame, rect, 1, DEFAULT_Q_LEVELS).unwrap();
    let m = build_class_matrix(&sig);
    let mut hit = 0;
    for y in rect.y..rect.y + rect.height {
        for x in rect.x..rect.x + rect.width {
            let [r, g, b] = frame.rgb(x, y);
            let (h, s) = quantize(rgb_to_hsv(r, g, b), DEFAULT_Q_LEVELS);
            hit += usize::from(m.membership(h, s));
        }
    }
    assert!(hit * 100 >= 99 * rect.width * rect.height, "{hit}/1600 with {sig}");
}

fn dense_distance(track: &TrackSpec, p: (f64, f64), spacing: f64) -> f64 {
    let mut best = f64::INFINITY;
    for w in track.waypoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b.0 - a.0).hypot(b.1 - a.1);
        let n = (len / spacing).ceil() as usize;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let q = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
            best = best.min((p.0 - q.0).hypot(p.1 - q.1));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cross_track_error_matches_dense_sampling(
        pts in prop::collection::vec((-0.1f64..0.1, -0.1f64..0.1), 2..4),
        x in -0.15f64..0.15,
        y in -0.15f64..0.15,
    ) {
        let Ok(track) = TrackSpec::new(pts) else { return Ok(()); };
        prop_assume!(track.waypoints.windows(2).all(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1) > 1e-3));
        let exact = cross_track_error(&track, &RobotPose::new(x, y, 0.0));
        let dense = dense_distance(&track, (x, y), 1e-6);
        prop_assert!(dense >= exact - 1e-12);
        prop_assert!(dense - exact <= 1e-6, "{dense} vs {exact}");
    }

    #[test]
    fn rendered_pixels_lie_in_the_tube(dx in -0.04f64..0.04, dy in -0.04f64..0.04, heading in -0.6f64..0.6) {
        let track = TrackSpec::corner(0.5, 90.0).unwrap();
        let cam = CameraModel::default();
        let pose = RobotPose::new(0.4 + dx, dy, heading);
        let frame = render_view(&track, &pose, &cam, 0);
        let half = track.line_width_m / 2.0;
        let tol = cam.meters_per_pixel() / 2.0;
        for row in 0..cam.image_height {
            for col in 0..cam.image_width {
                let d = track.nearest(cam.pixel_to_ground(&pose, col, row)).0;
                if frame.rgb(col, row) == track.line_color {
                    prop_assert!(d <= half + tol);
                } else {
                    prop_assert!(d > half - tol);
                }
            }
        }
    }

    #[test]
    fn render_is_deterministic(seed: u64, noise in 0.0f64..20.0) {
        let mut track = TrackSpec::straight(1.0).unwrap();
        track.noise_stddev = noise;
        let cam = CameraModel::default();
        let pose = track.start_pose();
        prop_assert_eq!(render_view(&track, &pose, &cam, seed), render_view(&track, &pose, &cam, seed));
    }
}
