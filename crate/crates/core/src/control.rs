//! Line-center extraction and the three-band steering law.

use std::fmt;
use std::str::FromStr;

use crate::colortrack::RegionReport;
use crate::error::{contract, Result};
use crate::imagecore::{PixelBuffer, PixelFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepCommand {
    Forward,
    Left,
    Right,
    Stop,
}

impl StepCommand {
    pub fn name(self) -> &'static str {
        match self {
            StepCommand::Forward => "FORWARD",
            StepCommand::Left => "LEFT",
            StepCommand::Right => "RIGHT",
            StepCommand::Stop => "STOP",
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            StepCommand::Left => StepCommand::Right,
            StepCommand::Right => StepCommand::Left,
            other => other,
        }
    }
}

impl fmt::Display for StepCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for StepCommand {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "FORWARD" => Ok(StepCommand::Forward),
            "LEFT" => Ok(StepCommand::Left),
            "RIGHT" => Ok(StepCommand::Right),
            "STOP" => Ok(StepCommand::Stop),
            _ => Err(format!("unknown command {s:?}")),
        }
    }
}

/// Band limits as fractions of the image width, and the scan row as a
/// fraction of the height measured from the top edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionConfig {
    pub left_frac: f64,
    pub right_frac: f64,
    pub scan_row_frac: f64,
}

impl Default for DecisionConfig {
    /// 130 and 170 on a 400 pixel axis; scan one sixth of the way down.
    fn default() -> Self {
        Self { left_frac: 130.0 / 400.0, right_frac: 170.0 / 400.0, scan_row_frac: 1.0 / 6.0 }
    }
}

impl DecisionConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.left_frac
            && self.left_frac < self.right_frac
            && self.right_frac < 1.0
            && 0.0 < self.scan_row_frac
            && self.scan_row_frac < 1.0;
        if ok {
            Ok(())
        } else {
            Err(contract(format!("invalid decision config {self:?}")))
        }
    }

    /// Pixel limits `(L, R)` for a given image width.
    pub fn limits(&self, width: usize) -> (usize, usize) {
        let w = width as f64;
        ((w * self.left_frac).round() as usize, (w * self.right_frac).round() as usize)
    }
}

/// Floor of the mean x over foreground pixels of `row`; `None` if the row
/// has none.
pub fn line_center(binary: &PixelBuffer, row: usize) -> Result<Option<usize>> {
    binary.expect_format(PixelFormat::Binary, "line_center")?;
    if row >= binary.height() {
        return Err(contract(format!("row {row} outside image of height {}", binary.height())));
    }
    let (sum, count) = binary
        .row(row)
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == 1)
        .fold((0usize, 0usize), |(s, n), (x, _)| (s + x, n + 1));
    Ok((count > 0).then(|| sum / count))
}

pub fn scan_row(height: usize, cfg: &DecisionConfig) -> usize {
    ((height as f64 * cfg.scan_row_frac).floor() as usize).min(height.saturating_sub(1))
}

pub fn decide(x_center: Option<usize>, width: usize, cfg: &DecisionConfig) -> StepCommand {
    let Some(x) = x_center else {
        return StepCommand::Stop;
    };
    let (left, right) = cfg.limits(width);
    if x <= left {
        StepCommand::Left
    } else if x <= right {
        StepCommand::Forward
    } else {
        StepCommand::Right
    }
}

/// Steers on the first (biggest) region; stops when nothing was found.
pub fn decide_from_regions(regions: &[RegionReport], width: usize, cfg: &DecisionConfig) -> StepCommand {
    decide(regions.first().map(|r| r.x_center), width, cfg)
}
