use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gait::RobotPose;

pub type Point = (f64, f64);

pub const DEFAULT_LINE_WIDTH_M: f64 = 0.025;
pub const BLACK: [u8; 3] = [0, 0, 0];
pub const WHITE: [u8; 3] = [255, 255, 255];
pub const RED: [u8; 3] = [200, 30, 30];

/// A painted line on the floor, described as a polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackSpec {
    pub waypoints: Vec<Point>,
    pub line_width_m: f64,
    pub line_color: [u8; 3],
    pub background_color: [u8; 3],
    /// Per-channel gaussian noise added by the renderer.
    pub noise_stddev: f64,
    pub brightness_scale: f64,
}

impl TrackSpec {
    /// Black 25 mm line on white through `waypoints`.
    pub fn new(waypoints: Vec<Point>) -> Result<Self> {
        let track = Self {
            waypoints,
            line_width_m: DEFAULT_LINE_WIDTH_M,
            line_color: BLACK,
            background_color: WHITE,
            noise_stddev: 0.0,
            brightness_scale: 1.0,
        };
        track.validate()?;
        Ok(track)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.waypoints.len() < 2 {
            return bad("a track needs at least two waypoints");
        }
        if self.waypoints.windows(2).any(|w| w[0] == w[1]) {
            return bad("consecutive waypoints must differ");
        }
        if self.line_width_m.is_nan() || self.line_width_m <= 0.0 {
            return bad("line width must be positive");
        }
        if [self.noise_stddev, self.brightness_scale].iter().any(|v| v.is_nan() || *v < 0.0) {
            return bad("noise and brightness must be non-negative");
        }
        Ok(())
    }

    pub fn with_colors(mut self, line: [u8; 3], background: [u8; 3]) -> Self {
        self.line_color = line;
        self.background_color = background;
        self
    }

    pub fn straight(length_m: f64) -> Result<Self> {
        Self::new(vec![(0.0, 0.0), (length_m, 0.0)])
    }

    /// Straight lead-in, a left-hand arc of `radius_m` sweeping `sweep_deg`
    /// (one waypoint per degree), then a straight lead-out.
    pub fn arc(lead_m: f64, radius_m: f64, sweep_deg: f64) -> Result<Self> {
        let mut wps = vec![(0.0, 0.0), (lead_m, 0.0)];
        let steps = sweep_deg.abs().ceil().max(1.0) as usize;
        let sweep = sweep_deg.to_radians();
        let center = (lead_m, radius_m * sweep.signum());
        for i in 1..=steps {
            let a = sweep * i as f64 / steps as f64;
            let phi = a - FRAC_PI_2 * sweep.signum();
            wps.push((center.0 + radius_m * phi.cos(), center.1 + radius_m * phi.sin()));
        }
        let end = *wps.last().unwrap();
        wps.push((end.0 + lead_m * sweep.cos(), end.1 + lead_m * sweep.sin()));
        Self::new(wps)
    }

    /// Two straight legs meeting at a sharp corner of `turn_deg` (positive = left).
    pub fn corner(leg_m: f64, turn_deg: f64) -> Result<Self> {
        let t = turn_deg.to_radians();
        Self::new(vec![(0.0, 0.0), (leg_m, 0.0), (leg_m + leg_m * t.cos(), leg_m * t.sin())])
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| dist(a, b)).sum()
    }

    pub(crate) fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.waypoints.windows(2).map(|w| (w[0], w[1]))
    }

    /// Pose on the first waypoint facing the second.
    pub fn start_pose(&self) -> RobotPose {
        let (a, b) = (self.waypoints[0], self.waypoints[1]);
        RobotPose::new(a.0, a.1, (b.1 - a.1).atan2(b.0 - a.0))
    }

    /// Distance to the polyline and the arc length of the nearest point.
    pub fn nearest(&self, p: Point) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        let mut along = 0.0;
        for (a, b) in self.segments() {
            let len = dist(a, b);
            let (d, t) = segment_distance(p, a, b);
            if d < best.0 {
                best = (d, along + t * len);
            }
            along += len;
        }
        best
    }

    /// Copy whose last segment continues `extra_m` further.
    pub fn extended(&self, extra_m: f64) -> Self {
        let mut out = self.clone();
        let n = out.waypoints.len();
        let (a, b) = (out.waypoints[n - 2], out.waypoints[n - 1]);
        let len = dist(a, b);
        out.waypoints[n - 1] = (b.0 + (b.0 - a.0) / len * extra_m, b.1 + (b.1 - a.1) / len * extra_m);
        out
    }

    /// Parses the plain-text track format:
    ///
    /// ```text
    /// width_m 0.025
    /// line_color 0 0 0
    /// background 255 255 255
    /// wp 0 0
    /// wp 1 0
    /// ```
    ///
    /// `noise <stddev>` and `brightness <scale>` lines are optional, and `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut width = None;
        let mut line_color = None;
        let mut background = None;
        let mut noise = 0.0;
        let mut brightness = 1.0;
        let mut wps = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            last_line = n;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| Error::TrackParse { line: n, message };
            let mut parts = content.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let values: Vec<&str> = parts.collect();
            let floats = |count: usize| -> Result<Vec<f64>> {
                if values.len() != count {
                    return Err(err(format!("{key} expects {count} values")));
                }
                values
                    .iter()
                    .map(|v| v.parse::<f64>().ok().filter(|f| f.is_finite()))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| err(format!("bad number in {content:?}")))
            };
            let rgb = || -> Result<[u8; 3]> {
                let v: Option<Vec<u8>> = values.iter().map(|v| v.parse().ok()).collect();
                match v.as_deref() {
                    Some(&[r, g, b]) => Ok([r, g, b]),
                    _ => Err(err(format!("{key} expects three levels 0-255"))),
                }
            };
            match key {
                "width_m" => width = Some(floats(1)?[0]),
                "line_color" => line_color = Some(rgb()?),
                "background" => background = Some(rgb()?),
                "noise" => noise = floats(1)?[0],
                "brightness" => brightness = floats(1)?[0],
                "wp" => {
                    let v = floats(2)?;
                    wps.push((v[0], v[1]));
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        let missing = |what: &str| Error::TrackParse { line: last_line, message: format!("missing {what}") };
        let track = Self {
            waypoints: wps,
            line_width_m: width.ok_or_else(|| missing("width_m"))?,
            line_color: line_color.ok_or_else(|| missing("line_color"))?,
            background_color: background.ok_or_else(|| missing("background"))?,
            noise_stddev: noise,
            brightness_scale: brightness,
        };
        track.validate().map_err(|e| Error::TrackParse { line: last_line, message: e.to_string() })?;
        Ok(track)
    }

    pub fn to_text(&self) -> String {
        let [r, g, b] = self.line_color;
        let [br, bg, bb] = self.background_color;
        let mut out = format!("width_m {}\nline_color {r} {g} {b}\nbackground {br} {bg} {bb}\n", self.line_width_m);
        if self.noise_stddev != 0.0 {
            let _ = writeln!(out, "noise {}", self.noise_stddev);
        }
        if self.brightness_scale != 1.0 {
            let _ = writeln!(out, "brightness {}", self.brightness_scale);
        }
        for (x, y) in &self.waypoints {
            let _ = writeln!(out, "wp {x} {y}");
        }
        out
    }
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (b.0 - a.0).hypot(b.1 - a.1)
}

/// Distance from `p` to segment `ab` and the clamped projection parameter.
pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> (f64, f64) {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    let q = (a.0 + t * dx, a.1 + t * dy);
    (dist(p, q), t)
}

/// Distance from the pose's position to the nearest point of the track.
pub fn cross_track_error(track: &TrackSpec, pose: &RobotPose) -> f64 {
    track.nearest((pose.x, pose.y)).0
}
