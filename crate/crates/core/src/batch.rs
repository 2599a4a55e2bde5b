//! Tiled, parallel edge ranking for rasters too large to process in one pass.
//!
//! The image is cut into a grid of disjoint cores. Each tile reads its core
//! plus a halo wide enough for every operator and for any chain of up to
//! `max_len` rows starting in the core, runs the full detect → trace pass on
//! that window, and keeps only the segments whose start lies in its core.
//! Per-tile results are merged in global scan order, so the output does not
//! depend on the worker count or on which tile finishes first.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pipeline::{auto_threshold, edge_maps, PipelineConfig, Threshold, MIN_TILE};
use crate::raster::{Rect, TileSource};
use crate::segment::{best_edge, trace_with, EdgeSegment, RankVector};

/// Support radius of the 3×3 gradient operators.
pub const GRADIENT_RADIUS: usize = 1;

/// Support radius of the default 5×5 LoG mask.
pub const LOG_RADIUS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TileSpec {
    pub index: usize,
    /// Pixels this tile owns.
    pub core: Rect,
    /// Nominal margins above/below and left/right of the core.
    pub halo_rows: usize,
    pub halo_cols: usize,
    /// Core plus halo, clamped to the image.
    pub window: Rect,
}

/// Margins `(rows, cols)` needed for exact tiled results.
///
/// Vertically a chain may run `max_len` rows below its start and is checked
/// one row further. Horizontally it may drift `max_len − 1` columns and its
/// thickness run may extend another `max_len`.
pub fn required_halo(max_len: usize, operator_radius: usize) -> (usize, usize) {
    let base = operator_radius + GRADIENT_RADIUS + 1;
    (base + max_len, base + 2 * max_len)
}

pub fn plan_tiles(width: usize, height: usize, tile: usize, max_len: usize) -> Result<Vec<TileSpec>> {
    plan_tiles_with(width, height, tile, max_len, LOG_RADIUS)
}

/// Grid of `tile`×`tile` cores (ragged on the right and bottom) in row-major order.
pub fn plan_tiles_with(
    width: usize,
    height: usize,
    tile: usize,
    max_len: usize,
    operator_radius: usize,
) -> Result<Vec<TileSpec>> {
    if tile < MIN_TILE {
        return Err(Error::InvalidParameter(format!(
            "tile must be at least {MIN_TILE}, got {tile}"
        )));
    }
    if max_len == 0 {
        return Err(Error::InvalidParameter("max_len must be at least 1".into()));
    }
    if width == 0 || height == 0 {
        return Err(Error::InvalidImage(format!("empty image {width}x{height}")));
    }
    let (halo_rows, halo_cols) = required_halo(max_len, operator_radius);
    let mut tiles = Vec::new();
    for top in (0..height).step_by(tile) {
        for left in (0..width).step_by(tile) {
            let core = Rect::new(top, left, tile.min(height - top), tile.min(width - left));
            tiles.push(TileSpec {
                index: tiles.len(),
                core,
                halo_rows,
                halo_cols,
                window: expand(core, halo_rows, halo_cols, width, height),
            });
        }
    }
    Ok(tiles)
}

fn expand(core: Rect, rows: usize, cols: usize, width: usize, height: usize) -> Rect {
    let top = core.top.saturating_sub(rows);
    let left = core.left.saturating_sub(cols);
    let bottom = (core.bottom() + rows).min(height);
    let right = (core.right() + cols).min(width);
    Rect::new(top, left, bottom - top, right - left)
}

/// Merged output of a tiled run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    /// All segments in global coordinates and global scan order.
    pub merged: RankVector,
    pub best: Option<EdgeSegment>,
    pub tiles_processed: usize,
    /// Wall time of each tile's detect → trace pass, by tile index.
    pub tile_millis: Vec<f64>,
    /// Segments cut at `max_len` rows.
    pub truncated: usize,
    pub threshold: f64,
}

impl BatchReport {
    /// Equality ignoring timings.
    pub fn same_result(&self, other: &BatchReport) -> bool {
        self.merged == other.merged
            && self.best == other.best
            && self.tiles_processed == other.tiles_processed
            && self.truncated == other.truncated
            && self.threshold.to_bits() == other.threshold.to_bits()
    }
}

fn check_tiles(tiles: &[TileSpec], width: usize, height: usize, cfg: &PipelineConfig) -> Result<()> {
    let mismatch = |msg: String| Err(Error::DimensionMismatch(msg));
    let (need_rows, need_cols) = required_halo(cfg.max_len, cfg.edge_kernel.radius());
    let image = Rect::new(0, 0, height, width);
    for t in tiles {
        let inside = |r: &Rect| r.bottom() <= height && r.right() <= width && r.area() > 0;
        if !inside(&t.core) || !inside(&t.window) {
            return mismatch(format!("tile {} lies outside the {width}x{height} image", t.index));
        }
        if t.halo_rows < need_rows || t.halo_cols < need_cols {
            return Err(Error::InvalidParameter(format!(
                "tile {} halo {}x{} is below the required {need_rows}x{need_cols}",
                t.index, t.halo_rows, t.halo_cols
            )));
        }
        if t.window != expand(t.core, t.halo_rows, t.halo_cols, width, height) {
            return mismatch(format!("tile {} window does not match its core and halo", t.index));
        }
    }
    // Cores must form row bands, each split into column intervals, covering the image.
    let mut cores: Vec<Rect> = tiles.iter().map(|t| t.core).collect();
    cores.sort_by_key(|r| (r.top, r.left));
    let mut row = 0;
    let mut i = 0;
    while i < cores.len() {
        let band = cores[i];
        if band.top != row {
            return mismatch(format!("tile cores do not cover row {row}"));
        }
        let mut col = 0;
        while i < cores.len() && cores[i].top == band.top {
            let c = cores[i];
            if c.height != band.height || c.left != col {
                return mismatch(format!("tile cores do not partition row band {}", band.top));
            }
            col = c.right();
            i += 1;
        }
        if col != width {
            return mismatch(format!("row band {} covers {col} of {width} columns", band.top));
        }
        row = band.bottom();
    }
    if row != image.height {
        return mismatch(format!("tile cores cover {row} of {height} rows"));
    }
    Ok(())
}

struct TileOutput {
    segments: Vec<EdgeSegment>,
    millis: f64,
}

/// Runs detect → trace on every tile with up to `workers` threads and merges
/// the per-tile rank vectors.
pub fn process_tiles<S: TileSource + ?Sized>(
    source: &S,
    tiles: &[TileSpec],
    cfg: &PipelineConfig,
    workers: usize,
) -> Result<BatchReport> {
    cfg.validate()?;
    if workers == 0 {
        return Err(Error::InvalidParameter("workers must be at least 1".into()));
    }
    let (width, height) = source.dimensions();
    check_tiles(tiles, width, height, cfg)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    let threshold = match cfg.threshold {
        Threshold::Fixed(t) => t,
        Threshold::Auto => {
            let peaks: Vec<f64> = pool.install(|| {
                tiles
                    .par_iter()
                    .map(|t| core_peak_response(source, t, cfg, width, height))
                    .collect::<Result<_>>()
            })?;
            auto_threshold(peaks.into_iter().fold(0.0, f64::max))
        }
    };

    let outputs: Vec<TileOutput> = pool.install(|| {
        tiles
            .par_iter()
            .map(|t| run_tile(source, t, cfg, threshold))
            .collect::<Result<_>>()
    })?;

    let mut tile_millis = Vec::with_capacity(outputs.len());
    let mut segments = Vec::new();
    for out in outputs {
        tile_millis.push(out.millis);
        segments.extend(out.segments);
    }
    // each start pixel yields at most one chain, so this order is total
    segments.sort_by_key(|s| s.start);
    let merged = RankVector::new(segments);
    let best = best_edge(&merged).ok().cloned();
    Ok(BatchReport {
        truncated: merged.iter().filter(|s| s.truncated).count(),
        best,
        merged,
        tiles_processed: tiles.len(),
        tile_millis,
        threshold,
    })
}

/// Largest absolute edge response over the tile's core.
fn core_peak_response<S: TileSource + ?Sized>(
    source: &S,
    tile: &TileSpec,
    cfg: &PipelineConfig,
    width: usize,
    height: usize,
) -> Result<f64> {
    // twice the radius keeps the window at least kernel-sized for thin cores
    let margin = 2 * cfg.edge_kernel.radius();
    let window = expand(tile.core, margin, margin, width, height);
    let img = source.read_window(window)?;
    let response = crate::detect::convolve2d(&img, &cfg.edge_kernel)?;
    let (dr, dc) = (tile.core.top - window.top, tile.core.left - window.left);
    let mut peak = 0.0_f64;
    for r in dr..dr + tile.core.height {
        for &v in &response.row(r)[dc..dc + tile.core.width] {
            peak = peak.max(v.abs());
        }
    }
    Ok(peak)
}

fn run_tile<S: TileSource + ?Sized>(
    source: &S,
    tile: &TileSpec,
    cfg: &PipelineConfig,
    threshold: f64,
) -> Result<TileOutput> {
    let started = Instant::now();
    let img = source.read_window(tile.window)?;
    let maps = edge_maps(&img, cfg, Some(threshold))?;
    let mut params = cfg.trace_params();
    params.length_cap = Some(cfg.max_len);
    let local_core = Rect::new(
        tile.core.top - tile.window.top,
        tile.core.left - tile.window.left,
        tile.core.height,
        tile.core.width,
    );
    let local = trace_with(&maps.edges, &maps.angles, &params, Some(local_core))?;
    let segments = local
        .segments
        .into_iter()
        .map(|s| s.translate(tile.window.top, tile.window.left))
        .collect();
    Ok(TileOutput {
        segments,
        millis: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Plans tiles from the configuration and processes them.
pub fn run_batch<S: TileSource + ?Sized>(source: &S, cfg: &PipelineConfig) -> Result<BatchReport> {
    let (width, height) = source.dimensions();
    let tiles = plan_tiles_with(width, height, cfg.tile, cfg.max_len, cfg.edge_kernel.radius())?;
    process_tiles(source, &tiles, cfg, cfg.workers)
}
