//! Spatial-domain filtering: convolution with clamp-to-edge borders, the 5×5
//! LoG operator, first-derivative gradients and binary thresholding.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Image;

/// A square, odd-sized correlation mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<f64>) -> Result<Self> {
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "kernel size must be odd, got {size}"
            )));
        }
        if weights.len() != size * size {
            return Err(Error::InvalidParameter(format!(
                "{} weights for a {size}x{size} kernel",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("kernel weights must be finite".into()));
        }
        Ok(Self { size, weights })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.size + j]
    }

    /// The kernel rotated a quarter turn clockwise.
    pub fn rotate90(&self) -> Kernel {
        let n = self.size;
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                weights[j * n + (n - 1 - i)] = self.get(i, j);
            }
        }
        Kernel { size: n, weights }
    }

    pub fn transpose(&self) -> Kernel {
        let n = self.size;
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                weights[j * n + i] = self.get(i, j);
            }
        }
        Kernel { size: n, weights }
    }

    pub fn delta(size: usize) -> Result<Kernel> {
        let mut weights = vec![0.0; size * size];
        if let Some(w) = weights.get_mut(size * size / 2) {
            *w = 1.0;
        }
        Kernel::new(size, weights)
    }
}

/// The fixed 5×5 integer Laplacian-of-Gaussian mask. Zero-sum, center −16.
pub fn log_kernel_5x5() -> Kernel {
    #[rustfmt::skip]
    let weights = vec![
        0.0, 0.0,   1.0, 0.0, 0.0,
        0.0, 1.0,   2.0, 1.0, 0.0,
        1.0, 2.0, -16.0, 2.0, 1.0,
        0.0, 1.0,   2.0, 1.0, 0.0,
        0.0, 0.0,   1.0, 0.0, 0.0,
    ];
    Kernel::new(5, weights).expect("static kernel")
}

/// Correlates `img` with `kernel`, replicating edge pixels outside the image.
///
/// `out(r, c) = Σ k(i, j) · img(r + i − s, c + j − s)` with `s = size / 2`.
/// Every output sample sums the nonzero taps in the same fixed order, so a
/// pixel gets bit-identical results from any crop that contains its support.
pub fn convolve2d(img: &Image, kernel: &Kernel) -> Result<Image> {
    let (w, h) = (img.width(), img.height());
    if kernel.size() > w.min(h) {
        return Err(Error::KernelTooLarge {
            kernel: kernel.size(),
            width: w,
            height: h,
        });
    }
    let s = kernel.radius();
    let taps: Vec<(isize, isize, f64)> = (0..kernel.size())
        .flat_map(|i| (0..kernel.size()).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let wt = kernel.get(i, j);
            (wt != 0.0).then_some((i as isize - s as isize, j as isize - s as isize, wt))
        })
        .collect();

    let src = img.pixels();
    let mut out = vec![0.0; w * h];
    for r in 0..h {
        let interior_row = r >= s && r + s < h;
        for c in 0..w {
            let mut acc = 0.0;
            if interior_row && c >= s && c + s < w {
                for &(di, dj, wt) in &taps {
                    let idx = (r as isize + di) as usize * w + (c as isize + dj) as usize;
                    acc += wt * src[idx];
                }
            } else {
                for &(di, dj, wt) in &taps {
                    acc += wt * img.get_clamped(r as isize + di, c as isize + dj);
                }
            }
            out[r * w + c] = acc;
        }
    }
    Image::new(w, h, out)
}

/// First-derivative operator used for the gradient.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientOperator {
    #[default]
    Sobel,
    Prewitt,
}

impl GradientOperator {
    /// Horizontal-derivative mask (`∂/∂x`, x growing with column).
    pub fn x_kernel(self) -> Kernel {
        let side = match self {
            GradientOperator::Sobel => 2.0,
            GradientOperator::Prewitt => 1.0,
        };
        #[rustfmt::skip]
        let weights = vec![
            -1.0,  0.0, 1.0,
            -side, 0.0, side,
            -1.0,  0.0, 1.0,
        ];
        Kernel::new(3, weights).expect("static kernel")
    }

    /// Vertical-derivative mask (`∂/∂y`, y growing with row).
    pub fn y_kernel(self) -> Kernel {
        self.x_kernel().transpose()
    }
}

/// Per-pixel partial derivatives of an image.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub gx: Image,
    pub gy: Image,
}

impl GradientField {
    pub fn width(&self) -> usize {
        self.gx.width()
    }

    pub fn height(&self) -> usize {
        self.gx.height()
    }
}

pub fn gradient(img: &Image, op: GradientOperator) -> Result<GradientField> {
    if img.width() < 3 || img.height() < 3 {
        return Err(Error::ImageTooSmall(format!(
            "gradient needs at least 3x3, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    Ok(GradientField {
        gx: convolve2d(img, &op.x_kernel())?,
        gy: convolve2d(img, &op.y_kernel())?,
    })
}

pub fn gradient_magnitude(g: &GradientField) -> Image {
    let mag = g
        .gx
        .pixels()
        .iter()
        .zip(g.gy.pixels())
        .map(|(x, y)| x.hypot(*y))
        .collect();
    Image::new(g.width(), g.height(), mag).expect("same shape as the gradient")
}

/// Gradient direction `α = atan(gy / gx)` per pixel, in `(−π/2, π/2]`.
///
/// Pixels with a zero gradient carry angle 0 and are marked invalid; they
/// must not contribute to angle statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleField {
    width: usize,
    height: usize,
    angles: Vec<f64>,
    valid: Vec<bool>,
}

impl AngleField {
    pub fn new(width: usize, height: usize, angles: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        if angles.len() != width * height || valid.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "angle field buffers do not match {width}x{height}"
            )));
        }
        Ok(Self {
            width,
            height,
            angles,
            valid,
        })
    }

    /// A field with every pixel a zero-gradient sentinel.
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            angles: vec![0.0; width * height],
            valid: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn angle(&self, row: usize, col: usize) -> f64 {
        self.angles[row * self.width + col]
    }

    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.valid[row * self.width + col]
    }

    /// The angle at `(row, col)`, or `None` for a zero-gradient pixel.
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let i = row * self.width + col;
        self.valid[i].then_some(self.angles[i])
    }
}

/// `atan(gy / gx)` folded into `(−π/2, π/2]`; `None` when both components vanish.
pub fn direction_angle(gx: f64, gy: f64) -> Option<f64> {
    if gx == 0.0 {
        if gy == 0.0 {
            None
        } else {
            Some(FRAC_PI_2)
        }
    } else {
        Some((gy / gx).atan())
    }
}

pub fn gradient_direction(g: &GradientField) -> AngleField {
    let n = g.width() * g.height();
    let mut angles = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    for (&x, &y) in g.gx.pixels().iter().zip(g.gy.pixels()) {
        match direction_angle(x, y) {
            Some(a) => {
                angles.push(a);
                valid.push(true);
            }
            None => {
                angles.push(0.0);
                valid.push(false);
            }
        }
    }
    AngleField {
        width: g.width(),
        height: g.height(),
        angles,
        valid,
    }
}

/// Angle of the edge with the x-axis, folded into `[0, π/2]`, given the
/// gradient direction at that pixel. The edge runs perpendicular to the gradient.
pub fn edge_normal_angle(alpha: f64) -> f64 {
    FRAC_PI_2 - alpha.abs()
}

/// Row-major boolean raster.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMap {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMap {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} bits for a {width}x{height} map",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                bits.push(f(r, c));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Sets every pixel whose absolute response reaches `t`.
pub fn binary_threshold(img: &Image, t: f64) -> Result<BinaryMap> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "threshold must be finite and >= 0, got {t}"
        )));
    }
    let bits = img.pixels().iter().map(|v| v.abs() >= t).collect();
    BinaryMap::new(img.width(), img.height(), bits)
}
