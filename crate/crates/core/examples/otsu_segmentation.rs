//! Renders a noisy, dim view of a dark line and segments it with Otsu's
//! threshold, printing the histogram split and the line center.
//!
//! ```bash
//! cargo run -p linefollow --example otsu_segmentation
//! ```

use linefollow::control::{decide, line_center, scan_row, DecisionConfig};
use linefollow::imagecore::rgb_to_gray;
use linefollow::segmentation::{histogram, otsu_segment, otsu_threshold};
use linefollow::sim::{render_view, CameraModel, TrackSpec};

fn main() -> linefollow::Result<()> {
    let mut track = TrackSpec::corner(0.5, 90.0)?;
    track.noise_stddev = 18.0;
    track.brightness_scale = 0.7;
    let cam = CameraModel::default();

    for (x, heading_deg) in [(0.0, 0.0), (0.3, 0.0), (0.40, 45.0)] {
        let pose = linefollow::gait::RobotPose::new(x, 0.0, f64::to_radians(heading_deg));
        let frame = render_view(&track, &pose, &cam, 1);
        let hist = histogram(&rgb_to_gray(&frame)?)?;
        let result = otsu_threshold(&hist)?;
        let (mask, _) = otsu_segment(&frame)?;
        let fg = mask.data().iter().filter(|&&v| v == 1).count();

        let cfg = DecisionConfig::default();
        let center = line_center(&mask, scan_row(mask.height(), &cfg))?;
        println!(
            "pose x={x:.2} heading={heading_deg:>4.1}  k={:>3} sigma_b^2={:>8.1}  foreground {:>5.1}%  center {:>4}  -> {}",
            result.threshold,
            result.between_class_variance,
            100.0 * fg as f64 / mask.data().len() as f64,
            center.map_or("-".into(), |c| c.to_string()),
            decide(center, mask.width(), &cfg)
        );
    }
    Ok(())
}
