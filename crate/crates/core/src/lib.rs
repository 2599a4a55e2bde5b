//! Automated best-edge selection and MTF measurement for grayscale imagery.
//!
//! The pipeline stages are:
//!
//! 1. **Detect** – 5×5 LoG response, binary threshold on its magnitude, and
//!    Sobel/Prewitt gradient angles.
//! 2. **Segment** – downward near-vertical chains traced through the binary
//!    map, measured for length `l`, thickness `t` and angle `Θ`, and ranked by
//!    `R = (l − t) / 10 + |Θ|`.
//! 3. **MTF** – edge spread function across the best edge, its first
//!    difference (line spread function), and the normalized DFT magnitude.
//!
//! [`batch`] runs stages 1–2 over overlapping tiles in parallel and produces
//! the same rank vector as the single-pass [`pipeline`].
//!
//! All coordinates are 0-based `(row, col)` with the origin at the top-left.

pub mod batch;
pub mod detect;
pub mod error;
pub mod mtf;
pub mod pipeline;
pub mod raster;
pub mod segment;
pub mod synth;

pub use error::{Error, Result};
pub use pipeline::{PipelineConfig, Threshold};
pub use raster::{Image, PixelCoord, Rect};
pub use segment::{EdgeSegment, RankVector, ScanMode};
