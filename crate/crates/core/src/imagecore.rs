//! Pixel buffers, binary netpbm I/O and color-space conversions.

use std::fs;
use std::path::Path;

use crate::error::{contract, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PixelFormat {
    Rgb8,
    Gray8,
    /// One byte per pixel holding 0 or 1.
    Binary,
}

impl PixelFormat {
    pub fn channels(self) -> usize {
        match self {
            PixelFormat::Rgb8 => 3,
            PixelFormat::Gray8 | PixelFormat::Binary => 1,
        }
    }
}

/// Row-major raster with the origin at the top-left corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelBuffer {
    width: usize,
    height: usize,
    format: PixelFormat,
    data: Vec<u8>,
}

impl PixelBuffer {
    pub fn new(width: usize, height: usize, format: PixelFormat, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(contract(format!("empty buffer {width}x{height}")));
        }
        let expected = width * height * format.channels();
        if data.len() != expected {
            return Err(contract(format!(
                "data length {} does not match {width}x{height} {format:?} ({expected})",
                data.len()
            )));
        }
        if format == PixelFormat::Binary && data.iter().any(|&v| v > 1) {
            return Err(contract("binary buffer holds a value other than 0 or 1"));
        }
        Ok(Self { width, height, format, data })
    }

    pub fn filled(width: usize, height: usize, format: PixelFormat, value: &[u8]) -> Result<Self> {
        if value.len() != format.channels() {
            return Err(contract("fill value does not match channel count"));
        }
        let data = value.repeat(width * height);
        Self::new(width, height, format, data)
    }

    pub fn from_rgb_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, PixelFormat::Rgb8, data)
    }

    pub fn from_gray_fn(
        width: usize,
        height: usize,
        format: PixelFormat,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        if format == PixelFormat::Rgb8 {
            return Err(contract("from_gray_fn builds single-channel buffers"));
        }
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, format, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn format(&self) -> PixelFormat {
        self.format
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn row(&self, y: usize) -> &[u8] {
        let stride = self.width * self.format.channels();
        &self.data[y * stride..(y + 1) * stride]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        self.data.chunks_exact(self.width * self.format.channels())
    }

    /// Single-channel value at `(x, y)`; for RGB buffers this is the red channel.
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[(y * self.width + x) * self.format.channels()]
    }

    pub fn rgb(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub(crate) fn expect_format(&self, format: PixelFormat, op: &str) -> Result<()> {
        if self.format != format {
            return Err(contract(format!(
                "{op} expects {format:?}, got {:?}",
                self.format
            )));
        }
        Ok(())
    }
}

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvPixel {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

/// Integer luma: `round((299 R + 587 G + 114 B) / 1000)`.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let sum = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((sum + 500) / 1000).min(255) as u8
}

pub fn rgb_to_gray(buffer: &PixelBuffer) -> Result<PixelBuffer> {
    buffer.expect_format(PixelFormat::Rgb8, "rgb_to_gray")?;
    let data = buffer
        .data()
        .chunks_exact(3)
        .map(|p| luma(p[0], p[1], p[2]))
        .collect();
    PixelBuffer::new(buffer.width(), buffer.height(), PixelFormat::Gray8, data)
}

/// Hexcone RGB to HSV conversion. Achromatic pixels get `h = 0`.
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> HsvPixel {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let v = max as f64 / 255.0;
    if max == 0 {
        return HsvPixel { h: 0.0, s: 0.0, v };
    }
    let delta = (max - min) as f64;
    let s = delta / max as f64;
    if max == min {
        return HsvPixel { h: 0.0, s, v };
    }
    let (r, g, b) = (r as f64, g as f64, b as f64);
    let sector = if max as f64 == r {
        (g - b) / delta
    } else if max as f64 == g {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let mut h = 60.0 * sector;
    if h < 0.0 {
        h += 360.0;
    }
    if h >= 360.0 {
        h -= 360.0;
    }
    HsvPixel { h, s, v }
}

pub fn hsv_to_rgb(p: HsvPixel) -> [u8; 3] {
    let c = p.v * p.s;
    let hp = (p.h / 60.0).rem_euclid(6.0);
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = p.v - c;
    let to_level = |u: f64| ((u + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [to_level(r), to_level(g), to_level(b)]
}

pub fn load_image(path: impl AsRef<Path>) -> Result<PixelBuffer> {
    let bytes = fs::read(path)?;
    decode_pnm(&bytes)
}

pub fn save_image(buffer: &PixelBuffer, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pnm(buffer))?;
    Ok(())
}

/// Comment line tagging a P5 file as a 0/255 binary mask.
const MASK_TAG: &str = "# mask";

/// Encodes as binary P5 (gray, binary) or P6 (RGB) with maxval 255.
/// Binary pixels are written as 0 / 255 under a `# mask` header comment.
pub fn encode_pnm(buffer: &PixelBuffer) -> Vec<u8> {
    let magic = match buffer.format() {
        PixelFormat::Rgb8 => "P6\n",
        PixelFormat::Gray8 => "P5\n",
        PixelFormat::Binary => "P5\n# mask\n",
    };
    let mut out = format!("{magic}{} {}\n255\n", buffer.width(), buffer.height()).into_bytes();
    match buffer.format() {
        PixelFormat::Binary => out.extend(buffer.data().iter().map(|&v| v * 255)),
        _ => out.extend_from_slice(buffer.data()),
    }
    out
}

/// Decodes a binary P5/P6 image with maxval 255.
///
/// A P5 file carrying the `# mask` comment and only 0/255 samples decodes
/// as [`PixelFormat::Binary`]; any other P5 decodes as `Gray8` (see
/// [`gray_to_binary`]).
pub fn decode_pnm(bytes: &[u8]) -> Result<PixelBuffer> {
    let mut cur = HeaderCursor { bytes, pos: 0, mask_tag: false };
    let format = match bytes.get(..2) {
        Some(b"P5") => PixelFormat::Gray8,
        Some(b"P6") => PixelFormat::Rgb8,
        _ => return Err(cur.error("expected magic P5 or P6")),
    };
    cur.pos = 2;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(cur.error("zero image dimension"));
    }
    if maxval != 255 {
        return Err(cur.error(format!("unsupported maxval {maxval}")));
    }
    match bytes.get(cur.pos) {
        Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(cur.error("expected single whitespace after maxval")),
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(format.channels()))
        .ok_or_else(|| cur.error("image dimensions overflow"))?;
    let data = &bytes[cur.pos..];
    if data.len() < len {
        return Err(Error::ImageParse {
            offset: bytes.len(),
            message: format!("truncated pixel data: expected {len} bytes, found {}", data.len()),
        });
    }
    let data = &data[..len];
    if format == PixelFormat::Gray8 && cur.mask_tag && data.iter().all(|&v| v == 0 || v == 255) {
        let bits = data.iter().map(|&v| v / 255).collect();
        return PixelBuffer::new(width, height, PixelFormat::Binary, bits);
    }
    PixelBuffer::new(width, height, format, data.to_vec())
}

/// Maps a gray mask to binary: nonzero pixels become 1.
pub fn gray_to_binary(buffer: &PixelBuffer) -> Result<PixelBuffer> {
    buffer.expect_format(PixelFormat::Gray8, "gray_to_binary")?;
    let data = buffer.data().iter().map(|&v| u8::from(v != 0)).collect();
    PixelBuffer::new(buffer.width(), buffer.height(), PixelFormat::Binary, data)
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    mask_tag: bool,
}

impl HeaderCursor<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::ImageParse { offset: self.pos, message: message.into() }
    }

    fn skip_separators(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'#' {
                let start = self.pos;
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
                if self.bytes[start..self.pos].trim_ascii_end() == MASK_TAG.as_bytes() {
                    self.mask_tag = true;
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let before = self.pos;
        self.skip_separators();
        if self.pos == before {
            return Err(self.error(format!("expected whitespace before {what}")));
        }
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(format!("expected decimal {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::ImageParse { offset: start, message: format!("{what} out of range") })
    }
}
