//! Streaming delimiting-box tracker.
//!
//! Each row is reduced to maximal runs of member pixels per signature. Runs
//! shorter than `noise_min_run` are dropped, the rest join any region whose
//! runs on the previous row overlap them horizontally (4-connectivity). When
//! a run bridges two regions they are merged on the spot. A region that gets
//! no run on the current row can never grow again and is closed.
//!
//! State between rows is the previous row's runs plus one accumulator per
//! open region, so memory is bounded by the image width, not its area.

use std::fmt;

use super::{build_class_matrix, quantize, ColorSignature};
use crate::error::{Error, Result};
use crate::imagecore::{rgb_to_hsv, PixelBuffer, PixelFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrackerConfig {
    /// Runs shorter than this many pixels are treated as noise.
    pub noise_min_run: usize,
    /// Regions with fewer pixels are dropped at the end of the frame.
    pub min_region_pixels: usize,
    /// Cap on reported regions; the smallest are dropped first.
    pub max_regions: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self { noise_min_run: 2, min_region_pixels: 20, max_regions: 135 }
    }
}

impl TrackerConfig {
    /// No noise filtering and no size floor.
    pub fn unfiltered() -> Self {
        Self { noise_min_run: 1, min_region_pixels: 1, max_regions: usize::MAX }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegionReport {
    pub signature: u8,
    /// Floor of the mean x coordinate of the region's pixels.
    pub x_center: usize,
    pub y_center: usize,
    pub width: usize,
    pub height: usize,
    pub pixel_count: usize,
    /// Left column of the delimiting box.
    pub left: usize,
    /// Top row of the delimiting box.
    pub top: usize,
}

impl fmt::Display for RegionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {}",
            self.signature, self.x_center, self.y_center, self.width, self.height, self.pixel_count
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct Accum {
    x_min: usize,
    x_max: usize,
    y_min: usize,
    y_max: usize,
    count: u64,
    sum_x: u64,
    sum_y: u64,
}

impl Accum {
    fn empty() -> Self {
        Self { x_min: usize::MAX, x_max: 0, y_min: usize::MAX, y_max: 0, count: 0, sum_x: 0, sum_y: 0 }
    }

    fn add_run(&mut self, start: usize, end: usize, y: usize) {
        let len = (end - start) as u64;
        self.x_min = self.x_min.min(start);
        self.x_max = self.x_max.max(end - 1);
        self.y_min = self.y_min.min(y);
        self.y_max = self.y_max.max(y);
        self.count += len;
        self.sum_x += len * (start + end - 1) as u64 / 2;
        self.sum_y += len * y as u64;
    }

    fn absorb(&mut self, other: &Accum) {
        self.x_min = self.x_min.min(other.x_min);
        self.x_max = self.x_max.max(other.x_max);
        self.y_min = self.y_min.min(other.y_min);
        self.y_max = self.y_max.max(other.y_max);
        self.count += other.count;
        self.sum_x += other.sum_x;
        self.sum_y += other.sum_y;
    }

    fn report(&self, signature: u8) -> RegionReport {
        RegionReport {
            signature,
            x_center: (self.sum_x / self.count) as usize,
            y_center: (self.sum_y / self.count) as usize,
            width: self.x_max - self.x_min + 1,
            height: self.y_max - self.y_min + 1,
            pixel_count: self.count as usize,
            left: self.x_min,
            top: self.y_min,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Run {
    start: usize,
    end: usize,
    slot: usize,
}

const OPEN: u8 = 0;
const LIVE: u8 = 1;
const CLOSED: u8 = 2;

/// Connected-run bookkeeping for one signature.
#[derive(Debug, Default)]
struct Lane {
    prev: Vec<Run>,
    cur: Vec<Run>,
    slots: Vec<Accum>,
    parent: Vec<usize>,
    mark: Vec<u8>,
    free: Vec<usize>,
    merged: Vec<usize>,
}

impl Lane {
    fn alloc(&mut self) -> usize {
        if let Some(s) = self.free.pop() {
            self.slots[s] = Accum::empty();
            self.parent[s] = s;
            s
        } else {
            self.slots.push(Accum::empty());
            self.parent.push(self.parent.len());
            self.mark.push(OPEN);
            self.slots.len() - 1
        }
    }

    fn find(&mut self, mut s: usize) -> usize {
        while self.parent[s] != s {
            let up = self.parent[s];
            self.parent[s] = self.parent[up];
            s = up;
        }
        s
    }

    fn union(&mut self, keep: usize, other: usize) -> usize {
        if keep == other {
            return keep;
        }
        let absorbed = self.slots[other];
        self.slots[keep].absorb(&absorbed);
        self.parent[other] = keep;
        self.merged.push(other);
        keep
    }

    /// Consumes one row given as a predicate over columns.
    fn push_row(
        &mut self,
        y: usize,
        width: usize,
        min_run: usize,
        member: impl Fn(usize) -> bool,
        closed: &mut impl FnMut(Accum),
    ) {
        self.cur.clear();
        let mut x = 0;
        while x < width {
            if !member(x) {
                x += 1;
                continue;
            }
            let start = x;
            while x < width && member(x) {
                x += 1;
            }
            if x - start >= min_run {
                self.cur.push(Run { start, end: x, slot: usize::MAX });
            }
        }

        let mut cur = std::mem::take(&mut self.cur);
        let mut i = 0;
        for run in cur.iter_mut() {
            while i < self.prev.len() && self.prev[i].end <= run.start {
                i += 1;
            }
            let mut root = None;
            let mut j = i;
            while j < self.prev.len() && self.prev[j].start < run.end {
                let r = self.find(self.prev[j].slot);
                root = Some(match root {
                    None => r,
                    Some(keep) => self.union(keep, r),
                });
                j += 1;
            }
            let slot = match root {
                Some(r) => r,
                None => self.alloc(),
            };
            self.slots[slot].add_run(run.start, run.end, y);
            run.slot = slot;
        }
        self.cur = cur;
        self.end_row(closed);
    }

    fn end_row(&mut self, closed: &mut impl FnMut(Accum)) {
        for k in 0..self.cur.len() {
            let r = self.find(self.cur[k].slot);
            self.cur[k].slot = r;
            self.mark[r] = LIVE;
        }
        for k in 0..self.prev.len() {
            let r = self.find(self.prev[k].slot);
            if self.mark[r] == OPEN {
                self.mark[r] = CLOSED;
                closed(self.slots[r]);
                self.free.push(r);
            }
        }
        for k in 0..self.cur.len() {
            self.mark[self.cur[k].slot] = OPEN;
        }
        for k in 0..self.prev.len() {
            let s = self.prev[k].slot;
            let r = self.find(s);
            self.mark[r] = OPEN;
        }
        for s in std::mem::take(&mut self.merged) {
            self.parent[s] = s;
            self.free.push(s);
        }
        std::mem::swap(&mut self.prev, &mut self.cur);
    }
}

/// Single-frame tracker fed one RGB row at a time.
#[derive(Debug)]
pub struct Tracker {
    width: usize,
    q_levels: u8,
    config: TrackerConfig,
    ids: Vec<u8>,
    /// Signature bit mask per `(h_level, s_level)` cell.
    lut: Vec<u32>,
    lanes: Vec<Lane>,
    bits: Vec<u32>,
    y: usize,
    found: Vec<RegionReport>,
}

impl Tracker {
    pub fn new(width: usize, sigs: &[ColorSignature], config: TrackerConfig) -> Result<Self> {
        if config.noise_min_run == 0 {
            return Err(Error::Config("noise_min_run must be at least 1".into()));
        }
        if sigs.len() > 32 {
            return Err(Error::Config("at most 32 signatures per tracker".into()));
        }
        let q_levels = sigs.first().map_or(super::DEFAULT_Q_LEVELS, |s| s.q_levels);
        if sigs.iter().any(|s| s.q_levels != q_levels) {
            return Err(Error::Config("signatures use different q_levels".into()));
        }
        let q = q_levels as usize;
        let mut lut = vec![0u32; q * q];
        for (bit, sig) in sigs.iter().enumerate() {
            let m = build_class_matrix(sig);
            for h in 0..q {
                for s in 0..q {
                    if m.membership(h as u8, s as u8) {
                        lut[h * q + s] |= 1 << bit;
                    }
                }
            }
        }
        Ok(Self {
            width,
            q_levels,
            config,
            ids: sigs.iter().map(|s| s.id).collect(),
            lut,
            lanes: sigs.iter().map(|_| Lane::default()).collect(),
            bits: vec![0; width],
            y: 0,
            found: Vec::new(),
        })
    }

    /// Feeds the next RGB row (`3 * width` bytes).
    pub fn push_row(&mut self, row: &[u8]) -> Result<()> {
        if row.len() != self.width * 3 {
            return Err(Error::Contract(format!(
                "row of {} bytes, expected {}",
                row.len(),
                self.width * 3
            )));
        }
        let q = self.q_levels as usize;
        for (bit, px) in self.bits.iter_mut().zip(row.chunks_exact(3)) {
            let (h, s) = quantize(rgb_to_hsv(px[0], px[1], px[2]), self.q_levels);
            *bit = self.lut[h as usize * q + s as usize];
        }
        let (y, width, min_run, min_pixels) =
            (self.y, self.width, self.config.noise_min_run, self.config.min_region_pixels);
        for (k, lane) in self.lanes.iter_mut().enumerate() {
            let id = self.ids[k];
            let bits = &self.bits;
            let found = &mut self.found;
            lane.push_row(y, width, min_run, |x| bits[x] >> k & 1 == 1, &mut |acc: Accum| {
                if acc.count as usize >= min_pixels {
                    found.push(acc.report(id));
                }
            });
        }
        self.y += 1;
        Ok(())
    }

    /// Closes every open region and returns the reports biggest first.
    pub fn finish(mut self) -> Vec<RegionReport> {
        let (y, width, min_pixels) = (self.y, self.width, self.config.min_region_pixels);
        for (k, lane) in self.lanes.iter_mut().enumerate() {
            let id = self.ids[k];
            let found = &mut self.found;
            lane.push_row(y, width, 1, |_| false, &mut |acc: Accum| {
                if acc.count as usize >= min_pixels {
                    found.push(acc.report(id));
                }
            });
        }
        let mut found = self.found;
        found.sort_by_key(|r| (std::cmp::Reverse(r.pixel_count), r.top, r.left, r.signature));
        found.truncate(self.config.max_regions);
        found
    }
}

/// Tracks regions over rows supplied by an iterator, in scan order.
pub fn track_rows<'a>(
    width: usize,
    rows: impl IntoIterator<Item = &'a [u8]>,
    sigs: &[ColorSignature],
    config: TrackerConfig,
) -> Result<Vec<RegionReport>> {
    let mut tracker = Tracker::new(width, sigs, config)?;
    for row in rows {
        tracker.push_row(row)?;
    }
    Ok(tracker.finish())
}

pub fn track_frame(
    image: &PixelBuffer,
    sigs: &[ColorSignature],
    config: TrackerConfig,
) -> Result<Vec<RegionReport>> {
    image.expect_format(PixelFormat::Rgb8, "track_frame")?;
    track_rows(image.width(), image.rows(), sigs, config)
}
