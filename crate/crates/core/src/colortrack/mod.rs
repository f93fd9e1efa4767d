//! Hue/saturation color signatures and single-pass region tracking.
//!
//! A signature holds four thresholds on quantized hue and saturation. They
//! are expanded into two boolean class arrays (one per channel) so that a
//! pixel test is two table lookups and an AND. [`tracker`] streams an RGB
//! frame row by row and grows delimiting boxes around runs of member pixels.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imagecore::{rgb_to_hsv, HsvPixel, PixelBuffer, PixelFormat};

pub mod tracker;

pub use tracker::{track_frame, track_rows, RegionReport, Tracker, TrackerConfig};

pub const DEFAULT_Q_LEVELS: u8 = 10;
pub const MAX_Q_LEVELS: u8 = 64;

/// Quantizes hue and saturation into `q_levels` bins each.
pub fn quantize(p: HsvPixel, q_levels: u8) -> (u8, u8) {
    let q = q_levels as f64;
    let top = q_levels.saturating_sub(1) as f64;
    let h = (p.h / 360.0 * q).floor().clamp(0.0, top) as u8;
    let s = (p.s * q).floor().clamp(0.0, top) as u8;
    (h, s)
}

/// A learned color class.
///
/// `lower_hue > upper_hue` encodes a hue range that wraps through 0, i.e.
/// `[lower_hue, q - 1] ∪ [0, upper_hue]`; red usually ends up this way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColorSignature {
    pub id: u8,
    pub lower_hue: u8,
    pub upper_hue: u8,
    pub lower_sat: u8,
    pub upper_sat: u8,
    pub q_levels: u8,
}

impl ColorSignature {
    pub fn new(id: u8, hue: (u8, u8), sat: (u8, u8), q_levels: u8) -> Result<Self> {
        let sig = Self {
            id,
            lower_hue: hue.0,
            upper_hue: hue.1,
            lower_sat: sat.0,
            upper_sat: sat.1,
            q_levels,
        };
        sig.validate().map_err(Error::Config)?;
        Ok(sig)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if !(1..=7).contains(&self.id) {
            return Err(format!("signature id {} outside 1..=7", self.id));
        }
        if !(2..=MAX_Q_LEVELS).contains(&self.q_levels) {
            return Err(format!("q_levels {} outside 2..={MAX_Q_LEVELS}", self.q_levels));
        }
        let q = self.q_levels;
        if [self.lower_hue, self.upper_hue, self.lower_sat, self.upper_sat].iter().any(|&v| v >= q) {
            return Err(format!("threshold outside [0, {q})"));
        }
        if self.lower_sat > self.upper_sat {
            return Err("lower_sat above upper_sat".into());
        }
        Ok(())
    }

    pub fn wraps(&self) -> bool {
        self.lower_hue > self.upper_hue
    }

    /// The hue range as one or two non-wrapping `(lo, hi)` intervals.
    pub fn hue_ranges(&self) -> Vec<(u8, u8)> {
        if self.wraps() {
            vec![(0, self.upper_hue), (self.lower_hue, self.q_levels - 1)]
        } else {
            vec![(self.lower_hue, self.upper_hue)]
        }
    }

    /// Membership by direct integer comparison of the four thresholds.
    pub fn contains_levels(&self, h: u8, s: u8) -> bool {
        let hue_ok = self.hue_ranges().iter().any(|&(lo, hi)| h >= lo && h <= hi);
        hue_ok && s >= self.lower_sat && s <= self.upper_sat
    }
}

impl fmt::Display for ColorSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {}",
            self.id, self.lower_hue, self.upper_hue, self.lower_sat, self.upper_sat, self.q_levels
        )
    }
}

impl FromStr for ColorSignature {
    type Err = String;

    fn from_str(line: &str) -> std::result::Result<Self, String> {
        let fields = line
            .split_whitespace()
            .map(|t| t.parse::<u8>().map_err(|_| format!("bad integer {t:?}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let [id, lower_hue, upper_hue, lower_sat, upper_sat, q_levels] = fields[..] else {
            return Err(format!("expected 6 fields, found {}", fields.len()));
        };
        let sig = Self { id, lower_hue, upper_hue, lower_sat, upper_sat, q_levels };
        sig.validate()?;
        Ok(sig)
    }
}

/// Parses a signature file: one `id lower_hue upper_hue lower_sat upper_sat
/// q_levels` record per line. Blank lines and `#` comments are skipped.
pub fn parse_signatures(text: &str) -> Result<Vec<ColorSignature>> {
    let mut sigs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let sig = line
            .parse::<ColorSignature>()
            .map_err(|message| Error::SignatureParse { line: i + 1, message })?;
        if let Some(first) = sigs.first().map(|s: &ColorSignature| s.q_levels) {
            if first != sig.q_levels {
                return Err(Error::SignatureParse {
                    line: i + 1,
                    message: "q_levels differs from earlier records".into(),
                });
            }
        }
        sigs.push(sig);
    }
    Ok(sigs)
}

pub fn format_signatures(sigs: &[ColorSignature]) -> String {
    sigs.iter().map(|s| format!("{s}\n")).collect()
}

/// Per-channel boolean class arrays, stored as bit masks (bit `i` = level `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassMatrix {
    hclass: u64,
    sclass: u64,
    q_levels: u8,
}

fn range_bits(lo: u8, hi: u8) -> u64 {
    (lo..=hi).fold(0, |acc, i| acc | (1u64 << i))
}

impl ClassMatrix {
    pub fn q_levels(&self) -> u8 {
        self.q_levels
    }

    pub fn hclass(&self) -> Vec<bool> {
        (0..self.q_levels).map(|i| self.hclass >> i & 1 == 1).collect()
    }

    pub fn sclass(&self) -> Vec<bool> {
        (0..self.q_levels).map(|i| self.sclass >> i & 1 == 1).collect()
    }

    pub fn membership(&self, h_level: u8, s_level: u8) -> bool {
        (self.hclass >> h_level) & (self.sclass >> s_level) & 1 == 1
    }
}

pub fn build_class_matrix(sig: &ColorSignature) -> ClassMatrix {
    let hclass = sig
        .hue_ranges()
        .into_iter()
        .fold(0, |acc, (lo, hi)| acc | range_bits(lo, hi));
    ClassMatrix {
        hclass,
        sclass: range_bits(sig.lower_sat, sig.upper_sat),
        q_levels: sig.q_levels,
    }
}

pub fn membership(m: &ClassMatrix, h_level: u8, s_level: u8) -> bool {
    m.membership(h_level, s_level)
}

/// Axis-aligned selection in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl FromStr for Rect {
    type Err = String;

    /// `x,y,w,h`
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let v = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad rect component {t:?}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        match v[..] {
            [x, y, width, height] => Ok(Rect { x, y, width, height }),
            _ => Err("rect must be x,y,w,h".into()),
        }
    }
}

/// Learns hue and saturation thresholds from the pixels inside `rect`.
///
/// Pixels in saturation level 0 carry no usable hue and are ignored. The
/// hue range is the shortest circular arc covering every observed level, so
/// a selection straddling 0° yields a wrapped signature.
pub fn learn_signature(image: &PixelBuffer, rect: Rect, id: u8, q_levels: u8) -> Result<ColorSignature> {
    image.expect_format(PixelFormat::Rgb8, "learn_signature")?;
    if rect.width == 0 || rect.height == 0 {
        return Err(crate::error::contract("empty selection"));
    }
    if rect.x + rect.width > image.width() || rect.y + rect.height > image.height() {
        return Err(crate::error::contract("selection exceeds image bounds"));
    }
    let mut hues = 0u64;
    let (mut s_min, mut s_max) = (u8::MAX, 0u8);
    for y in rect.y..rect.y + rect.height {
        for x in rect.x..rect.x + rect.width {
            let [r, g, b] = image.rgb(x, y);
            let (h, s) = quantize(rgb_to_hsv(r, g, b), q_levels);
            if s == 0 {
                continue;
            }
            hues |= 1 << h;
            s_min = s_min.min(s);
            s_max = s_max.max(s);
        }
    }
    if hues == 0 {
        return Err(Error::UnsaturatedRegion);
    }
    let (lo, hi) = covering_arc(hues, q_levels);
    ColorSignature::new(id, (lo, hi), (s_min, s_max), q_levels)
}

// Complement of the longest circular run of empty levels. Ties prefer the
// gap that crosses the top level so plain min/max wins when possible.
fn covering_arc(levels: u64, q: u8) -> (u8, u8) {
    let occupied: Vec<u8> = (0..q).filter(|&i| levels >> i & 1 == 1).collect();
    let (first, last) = (occupied[0], *occupied.last().unwrap());
    let mut best_gap = (q - 1 - last) + first;
    let mut arc = (first, last);
    for pair in occupied.windows(2) {
        let gap = pair[1] - pair[0] - 1;
        if gap > best_gap {
            best_gap = gap;
            arc = (pair[1], pair[0]);
        }
    }
    arc
}
