//! The single-pass detect → trace → rank pipeline and MTF measurement on
//! the best edge.

use serde::{Deserialize, Serialize};

use crate::detect::{
    binary_threshold, convolve2d, gradient, gradient_direction, log_kernel_5x5, AngleField,
    BinaryMap, GradientOperator, Kernel,
};
use crate::error::{Error, Result};
use crate::mtf::{
    extract_esf, lsf_from_esf_with, mtf50, mtf_from_lsf, EsfProfile, LsfMethod, LsfProfile,
    MtfCurve, DEFAULT_HALF_WINDOW,
};
use crate::raster::Image;
use crate::segment::{
    best_edge, trace_with, EdgeSegment, RankVector, ScanMode, TraceParams, DEFAULT_MIN_LEN,
    DEFAULT_RANK_DIVISOR,
};

/// Fraction of the peak absolute edge response used by [`Threshold::Auto`].
pub const AUTO_THRESHOLD_FRACTION: f64 = 0.2;

pub const DEFAULT_TILE: usize = 512;
pub const DEFAULT_MAX_LEN: usize = 256;
pub const MIN_TILE: usize = 16;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Threshold {
    /// `0.2 × max |response|` over the whole image.
    #[default]
    Auto,
    Fixed(f64),
}

/// Every tunable of the pipeline, with defaults for all of them.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub threshold: Threshold,
    pub min_len: usize,
    pub scan_mode: ScanMode,
    pub gradient_op: GradientOperator,
    pub half_window: usize,
    pub rank_divisor: f64,
    pub lsf_method: LsfMethod,
    pub tile: usize,
    /// Longest segment the tiled path reproduces exactly; also caps how far
    /// thickness runs are followed sideways.
    pub max_len: usize,
    pub workers: usize,
    pub edge_kernel: Kernel,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            threshold: Threshold::Auto,
            min_len: DEFAULT_MIN_LEN,
            scan_mode: ScanMode::MaximalRuns,
            gradient_op: GradientOperator::Sobel,
            half_window: DEFAULT_HALF_WINDOW,
            rank_divisor: DEFAULT_RANK_DIVISOR,
            lsf_method: LsfMethod::Forward,
            tile: DEFAULT_TILE,
            max_len: DEFAULT_MAX_LEN,
            workers: 1,
            edge_kernel: log_kernel_5x5(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if let Threshold::Fixed(t) = self.threshold {
            if !t.is_finite() || t < 0.0 {
                return bad(format!("threshold must be finite and >= 0, got {t}"));
            }
        }
        if self.min_len == 0 {
            return bad("min_len must be at least 1".into());
        }
        if self.half_window < 2 {
            return bad(format!("half_window must be at least 2, got {}", self.half_window));
        }
        if !self.rank_divisor.is_finite() || self.rank_divisor <= 0.0 {
            return bad(format!("rank divisor must be positive, got {}", self.rank_divisor));
        }
        if self.tile < MIN_TILE {
            return bad(format!("tile must be at least {MIN_TILE}, got {}", self.tile));
        }
        if self.max_len == 0 {
            return bad("max_len must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }

    /// Trace settings for the untiled path.
    pub fn trace_params(&self) -> TraceParams {
        TraceParams {
            min_len: self.min_len,
            mode: self.scan_mode,
            rank_divisor: self.rank_divisor,
            run_cap: Some(self.max_len),
            length_cap: None,
        }
    }
}

/// Threshold for a given peak absolute response.
///
/// A flat response yields the smallest positive threshold, so a blank image
/// produces an empty edge map instead of a full one.
pub fn auto_threshold(max_abs_response: f64) -> f64 {
    (AUTO_THRESHOLD_FRACTION * max_abs_response).max(f64::MIN_POSITIVE)
}

/// Intermediate rasters of one detection pass.
#[derive(Debug, Clone)]
pub struct EdgeMaps {
    pub response: Image,
    pub threshold: f64,
    pub edges: BinaryMap,
    pub angles: AngleField,
}

/// Edge response, thresholded map and gradient angles of `img`.
///
/// `threshold` overrides the configured rule; the tiled path uses it to apply
/// one image-wide value to every tile.
pub fn edge_maps(img: &Image, cfg: &PipelineConfig, threshold: Option<f64>) -> Result<EdgeMaps> {
    let response = convolve2d(img, &cfg.edge_kernel)?;
    let threshold = match (threshold, cfg.threshold) {
        (Some(t), _) | (None, Threshold::Fixed(t)) => t,
        (None, Threshold::Auto) => auto_threshold(response.max_abs()),
    };
    let edges = binary_threshold(&response, threshold)?;
    let angles = gradient_direction(&gradient(img, cfg.gradient_op)?);
    Ok(EdgeMaps {
        response,
        threshold,
        edges,
        angles,
    })
}

/// Runs detection and tracing over the whole image; segments come back in scan order.
pub fn rank_image(img: &Image, cfg: &PipelineConfig) -> Result<RankVector> {
    cfg.validate()?;
    let maps = edge_maps(img, cfg, None)?;
    trace_with(&maps.edges, &maps.angles, &cfg.trace_params(), None)
}

/// Profiles of one edge and the MTF derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtfMeasurement {
    pub edge: EdgeSegment,
    pub esf: EsfProfile,
    pub lsf: LsfProfile,
    pub curve: MtfCurve,
    pub mtf50: Option<f64>,
}

/// ESF → LSF → MTF across `edge`.
pub fn profile_edge(img: &Image, edge: &EdgeSegment, cfg: &PipelineConfig) -> Result<MtfMeasurement> {
    let esf = extract_esf(img, edge, cfg.half_window)?;
    let lsf = lsf_from_esf_with(&esf, cfg.lsf_method)?;
    let curve = mtf_from_lsf(&lsf)?;
    let mtf50 = mtf50(&curve);
    Ok(MtfMeasurement {
        edge: edge.clone(),
        esf,
        lsf,
        curve,
        mtf50,
    })
}

/// Selects the best edge of `img` and measures the MTF across it.
pub fn measure_mtf(img: &Image, cfg: &PipelineConfig) -> Result<MtfMeasurement> {
    let ranked = rank_image(img, cfg)?;
    let best = best_edge(&ranked).map_err(|_| Error::NoEdges)?;
    profile_edge(img, best, cfg)
}
