//! Near-vertical edge segments traced from a binary edge map, scored with
//! `R = (l − t) / 10 + |Θ|`, and collected into a rank vector.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::detect::{edge_normal_angle, AngleField, BinaryMap};
use crate::error::{Error, Result};
use crate::raster::{PixelCoord, Rect};

/// Divisor applied to `l − t` in the rank formula.
pub const DEFAULT_RANK_DIVISOR: f64 = 10.0;

/// Shortest segment kept by default.
pub const DEFAULT_MIN_LEN: usize = 6;

/// How chain starts are chosen while scanning the binary map.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// One chain per edge: a start has no set pixel directly above
    /// (`(r−1, c−1..=c+1)`) and no set pixel to its left (`(r, c−1)`).
    #[default]
    MaximalRuns,
    /// A chain from every set pixel, producing overlapping suffix runs.
    PerPixelRuns,
}

/// One scored candidate edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSegment {
    pub start: PixelCoord,
    /// Rows spanned by the chain.
    pub length: usize,
    /// Mean width of the horizontal run of set pixels around each chain pixel.
    pub thickness: f64,
    /// Edge angle with the x-axis in `[0, π/2]`; `π/2` is vertical.
    pub theta: f64,
    pub rank: f64,
    /// The chain stopped at a length cap while it could still continue.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
    /// Chain column for each spanned row, starting at `start.row`.
    #[serde(skip)]
    pub columns: Vec<usize>,
}

impl EdgeSegment {
    /// Column of the chain at absolute `row`, if the segment spans it.
    pub fn column_at(&self, row: usize) -> Option<usize> {
        row.checked_sub(self.start.row)
            .and_then(|i| self.columns.get(i))
            .copied()
    }

    /// Moves the segment by `(rows, cols)`, e.g. from tile to global coordinates.
    pub fn translate(mut self, rows: usize, cols: usize) -> Self {
        self.start.row += rows;
        self.start.col += cols;
        for c in &mut self.columns {
            *c += cols;
        }
        self
    }
}

/// Scored segments in scan order (row-major by start).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RankVector {
    pub segments: Vec<EdgeSegment>,
}

impl RankVector {
    pub fn new(segments: Vec<EdgeSegment>) -> Self {
        Self { segments }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, EdgeSegment> {
        self.segments.iter()
    }
}

impl FromIterator<EdgeSegment> for RankVector {
    fn from_iter<I: IntoIterator<Item = EdgeSegment>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// `(l − t) / 10 + |θ|`.
pub fn rank(length: f64, thickness: f64, theta: f64) -> Result<f64> {
    rank_with_divisor(length, thickness, theta, DEFAULT_RANK_DIVISOR)
}

pub fn rank_with_divisor(length: f64, thickness: f64, theta: f64, divisor: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::AngleOutOfRange(theta));
    }
    Ok((length - thickness) / divisor + theta.abs())
}

/// Knobs for [`trace_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceParams {
    pub min_len: usize,
    pub mode: ScanMode,
    pub rank_divisor: f64,
    /// Limit on how far a thickness run is followed on each side of the chain pixel.
    pub run_cap: Option<usize>,
    /// Chains stop after this many rows and are flagged truncated if they could continue.
    pub length_cap: Option<usize>,
}

impl TraceParams {
    pub fn new(min_len: usize, mode: ScanMode) -> Self {
        Self {
            min_len,
            mode,
            rank_divisor: DEFAULT_RANK_DIVISOR,
            run_cap: None,
            length_cap: None,
        }
    }
}

/// Traces every downward near-vertical chain in `bm` and scores it.
pub fn trace_segments(
    bm: &BinaryMap,
    angles: &AngleField,
    min_len: usize,
    mode: ScanMode,
) -> Result<RankVector> {
    trace_with(bm, angles, &TraceParams::new(min_len, mode), None)
}

/// Like [`trace_segments`], optionally restricted to starts inside `starts`.
pub fn trace_with(
    bm: &BinaryMap,
    angles: &AngleField,
    params: &TraceParams,
    starts: Option<Rect>,
) -> Result<RankVector> {
    if bm.width() != angles.width() || bm.height() != angles.height() {
        return Err(Error::DimensionMismatch(format!(
            "binary map {}x{} vs angle field {}x{}",
            bm.width(),
            bm.height(),
            angles.width(),
            angles.height()
        )));
    }
    if params.min_len == 0 {
        return Err(Error::InvalidParameter("min_len must be at least 1".into()));
    }
    if !(params.rank_divisor.is_finite() && params.rank_divisor > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rank divisor must be positive, got {}",
            params.rank_divisor
        )));
    }
    if params.length_cap == Some(0) {
        return Err(Error::InvalidParameter("length cap must be at least 1".into()));
    }
    let region = starts.unwrap_or(Rect::new(0, 0, bm.height(), bm.width()));
    let rows = region.top..region.bottom().min(bm.height());
    let cols = region.left..region.right().min(bm.width());

    let mut segments = Vec::new();
    for r in rows {
        for c in cols.clone() {
            if !is_start(bm, r, c, params.mode) {
                continue;
            }
            let (columns, truncated) = follow_chain(bm, r, c, params.length_cap);
            if columns.len() < params.min_len {
                continue;
            }
            segments.push(score(bm, angles, r, columns, truncated, params)?);
        }
    }
    Ok(RankVector::new(segments))
}

fn is_start(bm: &BinaryMap, r: usize, c: usize, mode: ScanMode) -> bool {
    if !bm.get(r, c) {
        return false;
    }
    match mode {
        ScanMode::PerPixelRuns => true,
        ScanMode::MaximalRuns => {
            let above = r > 0
                && (c.saturating_sub(1)..=(c + 1).min(bm.width() - 1)).any(|cc| bm.get(r - 1, cc));
            let left = c > 0 && bm.get(r, c - 1);
            !above && !left
        }
    }
}

/// Next chain column in row `r + 1`, preferring straight down, then right, then left.
fn step(bm: &BinaryMap, r: usize, c: usize) -> Option<usize> {
    if r + 1 >= bm.height() {
        return None;
    }
    let right = (c + 1 < bm.width()).then_some(c + 1);
    let left = c.checked_sub(1);
    [Some(c), right, left]
        .into_iter()
        .flatten()
        .find(|&cc| bm.get(r + 1, cc))
}

fn follow_chain(bm: &BinaryMap, r0: usize, c0: usize, cap: Option<usize>) -> (Vec<usize>, bool) {
    let mut columns = vec![c0];
    let (mut r, mut c) = (r0, c0);
    loop {
        let next = step(bm, r, c);
        if cap.is_some_and(|cap| columns.len() >= cap) {
            return (columns, next.is_some());
        }
        match next {
            Some(nc) => {
                r += 1;
                c = nc;
                columns.push(nc);
            }
            None => return (columns, false),
        }
    }
}

fn run_width(bm: &BinaryMap, r: usize, c: usize, cap: Option<usize>) -> usize {
    let cap = cap.unwrap_or(usize::MAX);
    let mut left = 0;
    while left < cap && left < c && bm.get(r, c - left - 1) {
        left += 1;
    }
    let mut right = 0;
    while right < cap && c + right + 1 < bm.width() && bm.get(r, c + right + 1) {
        right += 1;
    }
    left + right + 1
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Angle with the x-axis of the line from the first to the last chain pixel.
pub fn chain_angle(columns: &[usize]) -> f64 {
    match (columns.first(), columns.last()) {
        (Some(&first), Some(&last)) if columns.len() > 1 => {
            let dy = (columns.len() - 1) as f64;
            let dx = last.abs_diff(first) as f64;
            dy.atan2(dx)
        }
        _ => FRAC_PI_2,
    }
}

fn score(
    bm: &BinaryMap,
    angles: &AngleField,
    r0: usize,
    columns: Vec<usize>,
    truncated: bool,
    params: &TraceParams,
) -> Result<EdgeSegment> {
    let length = columns.len();
    let width_sum: usize = columns
        .iter()
        .enumerate()
        .map(|(i, &c)| run_width(bm, r0 + i, c, params.run_cap))
        .sum();
    let thickness = width_sum as f64 / length as f64;

    let mut normals: Vec<f64> = columns
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| angles.get(r0 + i, c))
        .map(edge_normal_angle)
        .collect();
    let theta = if normals.is_empty() {
        chain_angle(&columns)
    } else {
        median(&mut normals)
    }
    .clamp(0.0, FRAC_PI_2);

    Ok(EdgeSegment {
        start: PixelCoord::new(r0, columns[0]),
        length,
        thickness,
        theta,
        rank: rank_with_divisor(length as f64, thickness, theta, params.rank_divisor)?,
        truncated,
        columns,
    })
}

/// The segment with the highest rank; ties go to the longer segment, then to
/// the smaller `(row, col)` start.
pub fn best_edge(rv: &RankVector) -> Result<&EdgeSegment> {
    let mut iter = rv.segments.iter();
    let mut best = iter.next().ok_or(Error::EmptyRankVector)?;
    for seg in iter {
        let better = seg.rank > best.rank
            || (seg.rank == best.rank
                && (seg.length > best.length
                    || (seg.length == best.length && seg.start < best.start)));
        if better {
            best = seg;
        }
    }
    Ok(best)
}

/// Stable descending sort by rank.
pub fn sort_ranked(rv: &RankVector) -> RankVector {
    let mut segments = rv.segments.clone();
    segments.sort_by(|a, b| b.rank.total_cmp(&a.rank));
    RankVector::new(segments)
}
