//! Binary segmentation of a dark line from its background.
//!
//! Two routes are provided: Otsu's automatic threshold on gray levels, and
//! a hand-tuned conjunction of linear inequalities over the RGB channels.

use std::fmt;
use std::str::FromStr;

use crate::error::{contract, Error, Result};
use crate::imagecore::{PixelBuffer, PixelFormat};

pub const LEVELS: usize = 256;

/// Gray-level histogram of an 8-bit image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; LEVELS],
    total: u64,
}

impl Histogram {
    pub fn from_counts(counts: [u64; LEVELS]) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64; LEVELS] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

pub fn histogram(gray: &PixelBuffer) -> Result<Histogram> {
    gray.expect_format(PixelFormat::Gray8, "histogram")?;
    let mut counts = [0u64; LEVELS];
    for &v in gray.data() {
        counts[v as usize] += 1;
    }
    Ok(Histogram::from_counts(counts))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub threshold: u8,
    pub between_class_variance: f64,
    /// Only one gray level is present; `threshold` is that level.
    pub degenerate: bool,
}

/// Between-class variance `w1 * w2 * (mu1 - mu2)^2` for the split
/// `C1 = [0, k]`, `C2 = (k, 255]`. Zero when either class is empty.
pub fn between_class_variance(hist: &Histogram, k: u8) -> f64 {
    let mut n1 = 0u64;
    let mut s1 = 0u128;
    for (level, &c) in hist.counts.iter().enumerate().take(k as usize + 1) {
        n1 += c;
        s1 += level as u128 * c as u128;
    }
    let total_sum = level_sum(hist);
    split_variance(hist.total, total_sum, n1, s1)
}

fn level_sum(hist: &Histogram) -> u128 {
    hist.counts
        .iter()
        .enumerate()
        .map(|(level, &c)| level as u128 * c as u128)
        .sum()
}

// With N pixels, n1 of them in C1 summing to s1 and S over the image,
// w1 w2 (mu1 - mu2)^2 = (N s1 - n1 S)^2 / (N^2 n1 n2). The numerator is
// formed exactly in integers so equal splits give bit-identical scores.
fn split_variance(total: u64, total_sum: u128, n1: u64, s1: u128) -> f64 {
    let n2 = total - n1;
    if n1 == 0 || n2 == 0 {
        return 0.0;
    }
    let d = total as i128 * s1 as i128 - n1 as i128 * total_sum as i128;
    let d = d as f64;
    let n = total as f64;
    d * d / (n * n * n1 as f64 * n2 as f64)
}

/// Otsu's threshold: the smallest level `k` maximizing the between-class
/// variance of the split `[0, k] | (k, 255]`.
pub fn otsu_threshold(hist: &Histogram) -> Result<ThresholdResult> {
    if hist.total == 0 {
        return Err(contract("otsu_threshold on an empty histogram"));
    }
    let mut occupied = hist.counts.iter().enumerate().filter(|(_, &c)| c > 0);
    let first = occupied.next().map(|(level, _)| level as u8).unwrap_or(0);
    if occupied.next().is_none() {
        return Ok(ThresholdResult { threshold: first, between_class_variance: 0.0, degenerate: true });
    }

    let total_sum = level_sum(hist);
    let mut n1 = 0u64;
    let mut s1 = 0u128;
    let mut best = ThresholdResult { threshold: 0, between_class_variance: -1.0, degenerate: false };
    for (level, &c) in hist.counts.iter().enumerate() {
        n1 += c;
        s1 += level as u128 * c as u128;
        let var = split_variance(hist.total, total_sum, n1, s1);
        if var > best.between_class_variance {
            best.threshold = level as u8;
            best.between_class_variance = var;
        }
    }
    Ok(best)
}

/// Maps `f <= t` to `below` and `f > t` to `above`.
pub fn apply_threshold(gray: &PixelBuffer, t: u8, below: u8, above: u8) -> Result<PixelBuffer> {
    gray.expect_format(PixelFormat::Gray8, "apply_threshold")?;
    if below > 1 || above > 1 {
        return Err(contract("binary output values must be 0 or 1"));
    }
    let data = gray.data().iter().map(|&f| if f <= t { below } else { above }).collect();
    PixelBuffer::new(gray.width(), gray.height(), PixelFormat::Binary, data)
}

/// Otsu segmentation of an RGB frame with dark pixels as foreground.
pub fn otsu_segment(rgb: &PixelBuffer) -> Result<(PixelBuffer, ThresholdResult)> {
    let gray = crate::imagecore::rgb_to_gray(rgb)?;
    let result = otsu_threshold(&histogram(&gray)?)?;
    let mask = if result.degenerate {
        PixelBuffer::filled(gray.width(), gray.height(), PixelFormat::Binary, &[0])?
    } else {
        apply_threshold(&gray, result.threshold, 1, 0)?
    };
    Ok((mask, result))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Less,
    Greater,
    LessEq,
    GreaterEq,
}

impl Comparator {
    fn holds(self, lhs: i32, rhs: i32) -> bool {
        match self {
            Comparator::Less => lhs < rhs,
            Comparator::Greater => lhs > rhs,
            Comparator::LessEq => lhs <= rhs,
            Comparator::GreaterEq => lhs >= rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Comparator::Less => "<",
            Comparator::Greater => ">",
            Comparator::LessEq => "<=",
            Comparator::GreaterEq => ">=",
        }
    }
}

/// `a_r R + a_g G + a_b B <op> constant` with coefficients in {-1, 0, 1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Clause {
    pub coeffs: [i32; 3],
    pub op: Comparator,
    pub constant: i32,
}

impl Clause {
    pub fn holds(&self, rgb: [u8; 3]) -> bool {
        let lhs: i32 = self.coeffs.iter().zip(rgb).map(|(&a, v)| a * v as i32).sum();
        self.op.holds(lhs, self.constant)
    }
}

/// Conjunction of linear RGB clauses; a pixel is foreground iff every
/// clause holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdRule {
    clauses: Vec<Clause>,
}

/// Dark-line rule: `R+G+B<250; G-B<30; R-B>-30`.
pub const DEFAULT_RULE: &str = "R+G+B<250;G-B<30;R-B>-30";

impl ThresholdRule {
    pub fn new(clauses: Vec<Clause>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(contract("a rule needs at least one clause"));
        }
        Ok(Self { clauses })
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn classify(&self, r: u8, g: u8, b: u8) -> bool {
        self.clauses.iter().all(|c| c.holds([r, g, b]))
    }
}

impl Default for ThresholdRule {
    fn default() -> Self {
        DEFAULT_RULE.parse().expect("built-in rule parses")
    }
}

impl FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let clauses = text
            .split(';')
            .enumerate()
            .map(|(i, clause)| parse_clause(clause).map_err(|message| Error::RuleParse { clause: i, message }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(clauses)
    }
}

pub fn parse_rule(text: &str) -> Result<ThresholdRule> {
    text.parse()
}

fn parse_clause(text: &str) -> std::result::Result<Clause, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty clause".into());
    }
    let op_at = compact
        .find(['<', '>', '≤', '≥'])
        .ok_or_else(|| format!("missing comparator in {compact:?}"))?;
    let (lhs, rest) = compact.split_at(op_at);
    let (op, rhs) = if let Some(r) = rest.strip_prefix("<=").or_else(|| rest.strip_prefix('≤')) {
        (Comparator::LessEq, r)
    } else if let Some(r) = rest.strip_prefix(">=").or_else(|| rest.strip_prefix('≥')) {
        (Comparator::GreaterEq, r)
    } else if let Some(r) = rest.strip_prefix('<') {
        (Comparator::Less, r)
    } else {
        (Comparator::Greater, &rest[1..])
    };

    let mut coeffs = [0i32; 3];
    let mut terms = 0;
    let mut sign: Option<i32> = None;
    for ch in lhs.chars() {
        match ch {
            '+' | '-' if sign.is_some() => return Err("doubled sign".into()),
            '+' | '-' => sign = Some(if ch == '-' { -1 } else { 1 }),
            _ if terms == 0 || sign.is_some() => {
                let channel = match ch.to_ascii_uppercase() {
                    'R' => 0,
                    'G' => 1,
                    'B' => 2,
                    _ => return Err(format!("unknown token {ch:?}")),
                };
                if coeffs[channel] != 0 {
                    return Err(format!("channel {ch} appears twice"));
                }
                coeffs[channel] = sign.take().unwrap_or(1);
                terms += 1;
            }
            _ => return Err(format!("unexpected {ch:?} after a channel")),
        }
    }
    let expect_term = sign.is_some();
    if terms == 0 || expect_term {
        return Err("missing channel term".into());
    }
    let constant = rhs.parse::<i32>().map_err(|_| format!("bad constant {rhs:?}"))?;
    Ok(Clause { coeffs, op, constant })
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, clause) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            let mut first = true;
            for (a, name) in clause.coeffs.iter().zip(["R", "G", "B"]) {
                match (*a, first) {
                    (0, _) => continue,
                    (a, true) if a < 0 => f.write_str("-")?,
                    (_, true) => {}
                    (a, false) => f.write_str(if a < 0 { "-" } else { "+" })?,
                }
                f.write_str(name)?;
                first = false;
            }
            write!(f, "{}{}", clause.op.symbol(), clause.constant)?;
        }
        Ok(())
    }
}

pub fn rule_classify(r: u8, g: u8, b: u8, rule: &ThresholdRule) -> bool {
    rule.classify(r, g, b)
}

pub fn rule_segment(buffer: &PixelBuffer, rule: &ThresholdRule) -> Result<PixelBuffer> {
    buffer.expect_format(PixelFormat::Rgb8, "rule_segment")?;
    let data = buffer
        .data()
        .chunks_exact(3)
        .map(|p| u8::from(rule.classify(p[0], p[1], p[2])))
        .collect();
    PixelBuffer::new(buffer.width(), buffer.height(), PixelFormat::Binary, data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PixelClass {
    Black,
    White,
}

impl PixelClass {
    pub fn name(self) -> &'static str {
        match self {
            PixelClass::Black => "black",
            PixelClass::White => "white",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledSample {
    pub rgb: [u8; 3],
    /// 1-based scenario index.
    pub scenario: usize,
    pub class: PixelClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellStats {
    pub scenario: usize,
    pub class: PixelClass,
    pub total: usize,
    pub correct: usize,
}

impl CellStats {
    pub fn incorrect(&self) -> usize {
        self.total - self.correct
    }

    pub fn rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.correct as f64 / self.total as f64
        }
    }
}

/// Success rates per (class, scenario) cell plus the overall total.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    /// Black cells first, then white; scenarios ascending within a class.
    pub cells: Vec<CellStats>,
    pub total: usize,
    pub correct: usize,
}

impl ScenarioReport {
    pub fn overall_rate(&self) -> f64 {
        100.0 * self.correct as f64 / self.total as f64
    }

    pub fn cell(&self, scenario: usize, class: PixelClass) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.scenario == scenario && c.class == class)
    }

    /// One `scenario,class,total,correct,rate` record per cell, then a
    /// `total,all,...` record. Rates are percentages with two decimals.
    pub fn records(&self) -> String {
        let mut out = String::from("scenario,class,total,correct,rate\n");
        for c in &self.cells {
            out += &format!("{},{},{},{},{:.2}\n", c.scenario, c.class.name(), c.total, c.correct, c.rate());
        }
        out += &format!("total,all,{},{},{:.2}\n", self.total, self.correct, self.overall_rate());
        out
    }
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blacks: Vec<_> = self.cells.iter().filter(|c| c.class == PixelClass::Black).collect();
        let whites: Vec<_> = self.cells.iter().filter(|c| c.class == PixelClass::White).collect();
        let ordered: Vec<&CellStats> = blacks.iter().chain(whites.iter()).copied().collect();

        write!(f, "{:<22}", "Class")?;
        for c in &ordered {
            write!(f, "{:>7}", c.class.name())?;
        }
        writeln!(f, "{:>8}", "")?;
        write!(f, "{:<22}", "Scenario")?;
        for c in &ordered {
            write!(f, "{:>7}", c.scenario)?;
        }
        writeln!(f, "{:>8}", "TOTAL")?;

        let row = |f: &mut fmt::Formatter<'_>, label: &str, cell: &dyn Fn(&CellStats) -> String, total: String| {
            write!(f, "{label:<22}")?;
            for c in &ordered {
                write!(f, "{:>7}", cell(c))?;
            }
            writeln!(f, "{total:>8}")
        };
        row(f, "Collected samples", &|c| c.total.to_string(), self.total.to_string())?;
        row(f, "Properly classified", &|c| c.correct.to_string(), self.correct.to_string())?;
        row(
            f,
            "Improperly classified",
            &|c| c.incorrect().to_string(),
            (self.total - self.correct).to_string(),
        )?;
        row(
            f,
            "Success rate",
            &|c| format!("{:.0}%", c.rate()),
            format!("{:.0}%", self.overall_rate()),
        )
    }
}

/// Classifies every sample with `rule` (foreground = black) and tallies
/// the outcome per scenario and class.
pub fn scenario_eval(samples: &[LabeledSample], rule: &ThresholdRule) -> Result<ScenarioReport> {
    if samples.is_empty() {
        return Err(contract("scenario_eval needs at least one sample"));
    }
    let mut cells: Vec<CellStats> = Vec::new();
    for s in samples {
        let predicted = if rule.classify(s.rgb[0], s.rgb[1], s.rgb[2]) {
            PixelClass::Black
        } else {
            PixelClass::White
        };
        let idx = match cells.iter().position(|c| c.scenario == s.scenario && c.class == s.class) {
            Some(i) => i,
            None => {
                cells.push(CellStats { scenario: s.scenario, class: s.class, total: 0, correct: 0 });
                cells.len() - 1
            }
        };
        cells[idx].total += 1;
        cells[idx].correct += usize::from(predicted == s.class);
    }
    cells.sort_by_key(|c| (c.class, c.scenario));
    let total = cells.iter().map(|c| c.total).sum();
    let correct = cells.iter().map(|c| c.correct).sum();
    Ok(ScenarioReport { cells, total, correct })
}
