//! Grayscale raster representation, PGM/PNG codecs and windowed access.
//!
//! Coordinates are 0-based `(row, col)` with the origin at the top-left pixel.
//! `x` grows with `col`, `y` grows with `row`.

mod pgm;
#[cfg(feature = "png")]
mod png;

pub use pgm::{load_pgm, write_pgm, PgmFile};
#[cfg(feature = "png")]
pub use png::load_png;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2-D grayscale raster of finite real intensities, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

/// A pixel position, `row` counted from the top and `col` from the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PixelCoord {
    pub row: usize,
    pub col: usize,
}

impl PixelCoord {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// An axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub top: usize,
    pub left: usize,
    pub height: usize,
    pub width: usize,
}

impl Rect {
    pub fn new(top: usize, left: usize, height: usize, width: usize) -> Self {
        Self {
            top,
            left,
            height,
            width,
        }
    }

    pub fn bottom(&self) -> usize {
        self.top + self.height
    }

    pub fn right(&self) -> usize {
        self.left + self.width
    }

    pub fn area(&self) -> usize {
        self.height * self.width
    }

    pub fn contains(&self, p: PixelCoord) -> bool {
        p.row >= self.top && p.row < self.bottom() && p.col >= self.left && p.col < self.right()
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.top < other.bottom()
            && other.top < self.bottom()
            && self.left < other.right()
            && other.left < self.right()
    }
}

impl Image {
    /// Builds an image from row-major samples.
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} samples for a {width}x{height} image",
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidImage(format!(
                "non-finite intensity at index {i}"
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    ///
    /// Panics if the dimensions are zero or `f` yields a non-finite value.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self::new(width, height, pixels).expect("from_fn produced an invalid image")
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Sample with clamp-to-edge addressing for signed coordinates.
    #[inline]
    pub fn get_clamped(&self, row: isize, col: isize) -> f64 {
        let r = row.clamp(0, self.height as isize - 1) as usize;
        let c = col.clamp(0, self.width as isize - 1) as usize;
        self.pixels[r * self.width + c]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.pixels[row * self.width..(row + 1) * self.width]
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0, 0, self.height, self.width)
    }

    /// Applies `f` to every intensity.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image::from_fn(self.width, self.height, |r, c| f(self.get(r, c)))
    }

    /// Copies the `h`×`w` window whose top-left pixel is `(top, left)`.
    pub fn crop(&self, top: usize, left: usize, h: usize, w: usize) -> Result<Image> {
        let out_of_bounds = h == 0
            || w == 0
            || top.checked_add(h).is_none_or(|b| b > self.height)
            || left.checked_add(w).is_none_or(|r| r > self.width);
        if out_of_bounds {
            return Err(Error::WindowOutOfBounds {
                top,
                left,
                height: h,
                width: w,
                image_height: self.height,
                image_width: self.width,
            });
        }
        let mut pixels = Vec::with_capacity(h * w);
        for r in top..top + h {
            pixels.extend_from_slice(&self.row(r)[left..left + w]);
        }
        Ok(Image {
            width: w,
            height: h,
            pixels,
        })
    }

    pub fn crop_rect(&self, rect: Rect) -> Result<Image> {
        self.crop(rect.top, rect.left, rect.height, rect.width)
    }

    /// Left-right mirror image.
    pub fn mirror_columns(&self) -> Image {
        Image::from_fn(self.width, self.height, |r, c| self.get(r, self.width - 1 - c))
    }

    pub fn max_abs(&self) -> f64 {
        self.pixels.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Random-access provider of image windows.
///
/// Implemented by in-memory images and by P5 files read lazily from disk, so
/// the tiled pipeline can bound its working memory.
pub trait TileSource: Sync {
    /// `(width, height)` of the full raster.
    fn dimensions(&self) -> (usize, usize);

    fn read_window(&self, rect: Rect) -> Result<Image>;
}

impl TileSource for Image {
    fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    fn read_window(&self, rect: Rect) -> Result<Image> {
        self.crop_rect(rect)
    }
}

/// Loads a PGM (P2/P5) or, with the `png` feature, a PNG file.
///
/// The format is chosen from the file's magic bytes, not its extension.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let bytes = std::fs::read(path.as_ref())?;
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P2") {
        return load_pgm(&bytes);
    }
    #[cfg(feature = "png")]
    if bytes.starts_with(b"\x89PNG") {
        return load_png(&bytes);
    }
    Err(Error::UnsupportedFormat(format!(
        "{}: not a PGM or PNG file",
        path.as_ref().display()
    )))
}
