use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::track::{segment_distance, Point, TrackSpec};
use crate::gait::RobotPose;
use crate::imagecore::PixelBuffer;

/// Orthographic top-down camera: a `view_width_m` x `view_height_m` patch of
/// floor starting `forward_offset_m` ahead of the robot. Row 0 is the far
/// edge and column 0 the robot's left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    pub view_width_m: f64,
    pub view_height_m: f64,
    pub image_width: usize,
    pub image_height: usize,
    pub forward_offset_m: f64,
    /// Continuous image x coordinate (pixel edges at integers) of the
    /// robot's centerline.
    pub axis_column: f64,
}

/// Default `axis_column`: the centerline falls between columns 150 and 151,
/// the middle of the default forward band `131..=170` at width 400.
pub const DEFAULT_AXIS_COLUMN: f64 = 151.0;

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            view_width_m: 0.20,
            view_height_m: 0.15,
            image_width: 400,
            image_height: 300,
            forward_offset_m: 0.05,
            axis_column: DEFAULT_AXIS_COLUMN,
        }
    }
}

impl CameraModel {
    /// Ground size of one pixel along the image x axis.
    pub fn meters_per_pixel(&self) -> f64 {
        self.view_width_m / self.image_width as f64
    }

    /// Camera with the centerline on the middle of the image.
    pub fn centered() -> Self {
        let cam = Self::default();
        Self { axis_column: cam.image_width as f64 / 2.0, ..cam }
    }

    /// Farthest ground distance the view can reach from the robot origin.
    pub fn reach(&self) -> f64 {
        let side = self.axis_column.max(self.image_width as f64 - self.axis_column) * self.meters_per_pixel();
        (self.forward_offset_m + self.view_height_m).hypot(side)
    }

    /// `(forward, left)` offset in the robot frame of a pixel center.
    pub fn pixel_offset(&self, col: f64, row: f64) -> (f64, f64) {
        let forward = self.forward_offset_m
            + self.view_height_m * (1.0 - (row + 0.5) / self.image_height as f64);
        let left = (self.axis_column - (col + 0.5)) * self.meters_per_pixel();
        (forward, left)
    }

    /// World position of the center of pixel `(col, row)`.
    pub fn pixel_to_ground(&self, pose: &RobotPose, col: usize, row: usize) -> Point {
        self.ground_at(pose, col as f64, row as f64)
    }

    fn ground_at(&self, pose: &RobotPose, col: f64, row: f64) -> Point {
        let (f, l) = self.pixel_offset(col, row);
        let (s, c) = pose.heading.sin_cos();
        (pose.x + f * c - l * s, pose.y + f * s + l * c)
    }
}

/// Renders the camera view at `pose`. A pixel takes the line color iff its
/// ground point lies within half the line width of the track polyline;
/// brightness scaling and gaussian noise (seeded by `seed`) follow.
pub fn render_view(track: &TrackSpec, pose: &RobotPose, cam: &CameraModel, seed: u64) -> PixelBuffer {
    let half = track.line_width_m / 2.0;
    let (w, h) = (cam.image_width, cam.image_height);
    let shade = |rgb: [u8; 3]| rgb.map(|c| (c as f64 * track.brightness_scale).round().clamp(0.0, 255.0) as u8);
    let line = shade(track.line_color);
    let background = shade(track.background_color);

    let mut data = background.repeat(w * h);
    let segments: Vec<(Point, Point)> = track.segments().collect();
    let mut candidates = Vec::new();
    // Tiles only test segments that can reach them.
    for ty in (0..h).step_by(TILE) {
        for tx in (0..w).step_by(TILE) {
            let (x1, y1) = ((tx + TILE).min(w), (ty + TILE).min(h));
            let center = cam.ground_at(pose, (tx + x1) as f64 / 2.0 - 0.5, (ty + y1) as f64 / 2.0 - 0.5);
            let tile_radius = (((x1 - tx) as f64 * cam.meters_per_pixel()) / 2.0)
                .hypot((y1 - ty) as f64 * cam.view_height_m / h as f64 / 2.0);
            candidates.clear();
            candidates.extend(
                segments.iter().filter(|&&(a, b)| segment_distance(center, a, b).0 <= tile_radius + half + 1e-9),
            );
            if candidates.is_empty() {
                continue;
            }
            for row in ty..y1 {
                for col in tx..x1 {
                    let p = cam.pixel_to_ground(pose, col, row);
                    if candidates.iter().any(|&&(a, b)| segment_distance(p, a, b).0 <= half) {
                        let i = (row * w + col) * 3;
                        data[i..i + 3].copy_from_slice(&line);
                    }
                }
            }
        }
    }

    if track.noise_stddev > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, track.noise_stddev).expect("finite stddev");
        for v in data.iter_mut() {
            *v = (*v as f64 + normal.sample(&mut rng)).round().clamp(0.0, 255.0) as u8;
        }
    }
    PixelBuffer::new(w, h, crate::imagecore::PixelFormat::Rgb8, data).expect("camera dimensions are positive")
}

const TILE: usize = 16;

#[cfg(test)]
mod tests {
    use super::*;

    fn stripe(img: &PixelBuffer, row: usize, color: [u8; 3]) -> Vec<usize> {
        (0..img.width()).filter(|&x| img.rgb(x, row) == color).collect()
    }

    #[test]
    fn centered_on_straight_track() {
        let track = TrackSpec::straight(1.0).unwrap();
        let cam = CameraModel::centered();
        let img = render_view(&track, &track.start_pose(), &cam, 0);
        let cols = stripe(&img, 150, track.line_color);
        let mid = (cols[0] + cols[cols.len() - 1]) as f64 / 2.0;
        assert!((mid - 200.0).abs() <= 1.0, "stripe centered at {mid}");
        // 0.025 m / 0.0005 m per pixel
        assert_eq!(cols.len(), 50);
        assert!(cols.windows(2).all(|w| w[1] == w[0] + 1));
    }

    #[test]
    fn displaced_left_sees_line_right() {
        let track = TrackSpec::straight(1.0).unwrap();
        let img = render_view(&track, &RobotPose::new(0.0, 0.03, 0.0), &CameraModel::centered(), 0);
        let cols = stripe(&img, 150, track.line_color);
        let mid = (cols[0] + cols[cols.len() - 1]) as f64 / 2.0;
        assert!(mid > 200.0);
    }

    #[test]
    fn default_axis_sits_in_forward_band() {
        let track = TrackSpec::straight(1.0).unwrap();
        let img = render_view(&track, &track.start_pose(), &CameraModel::default(), 0);
        let cols = stripe(&img, 50, track.line_color);
        assert_eq!((cols[0], cols[cols.len() - 1]), (126, 175));
        assert_eq!(cols.iter().sum::<usize>() / cols.len(), 150);
    }

    #[test]
    fn brightness_and_noise() {
        let mut track = TrackSpec::straight(1.0).unwrap();
        track.brightness_scale = 0.5;
        let img = render_view(&track, &track.start_pose(), &CameraModel::default(), 0);
        assert_eq!(img.rgb(0, 0), [128, 128, 128]);

        track.noise_stddev = 10.0;
        let a = render_view(&track, &track.start_pose(), &CameraModel::default(), 7);
        let b = render_view(&track, &track.start_pose(), &CameraModel::default(), 7);
        let c = render_view(&track, &track.start_pose(), &CameraModel::default(), 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
