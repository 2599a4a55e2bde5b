//! Synthetic straight-edge targets with known blur, plus the closed-form MTF
//! models used to check measurements against them.

use std::f64::consts::{FRAC_PI_2, LN_2, PI, SQRT_2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Image;

/// Identifier of the noise generator; recorded alongside noisy targets.
pub const NOISE_ALGORITHM: &str = "chacha8/ziggurat-normal";

/// A blurred straight edge between two intensity levels.
///
/// Pixel centers sit at integer `(x = col, y = row)`; the image center is
/// `((w − 1) / 2, (h − 1) / 2)`. The signed distance of a pixel from the edge
/// line is `d = (x − xc)·sin θ + (y − yc)·cos θ − offset`, so for a vertical
/// edge (`θ = π/2`) the `high` side is on the right. Negative angles describe
/// the left-right mirror of the positive ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeTarget {
    pub width: usize,
    pub height: usize,
    /// Radians from the x-axis, in `[−π/2, π/2]`.
    pub edge_angle: f64,
    pub edge_offset: f64,
    pub low: f64,
    pub high: f64,
    pub blur_sigma: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for EdgeTarget {
    fn default() -> Self {
        Self {
            width: 256,
            height: 256,
            edge_angle: FRAC_PI_2,
            edge_offset: 0.0,
            low: 0.0,
            high: 200.0,
            blur_sigma: 0.0,
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

impl EdgeTarget {
    pub fn vertical(width: usize, height: usize, blur_sigma: f64) -> Self {
        Self {
            width,
            height,
            blur_sigma,
            ..Self::default()
        }
    }

    /// The same edge reflected left-right.
    pub fn mirrored(&self) -> Self {
        Self {
            edge_angle: -self.edge_angle,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.width == 0 || self.height == 0 {
            return bad(format!("empty target {}x{}", self.width, self.height));
        }
        if !self.low.is_finite() || !self.high.is_finite() || self.low >= self.high {
            return bad(format!("need low < high, got {} and {}", self.low, self.high));
        }
        if self.edge_angle.is_nan() || self.edge_angle.abs() > FRAC_PI_2 {
            return bad(format!("edge angle {} outside [-pi/2, pi/2]", self.edge_angle));
        }
        if !self.edge_offset.is_finite() {
            return bad("edge offset must be finite".into());
        }
        if !self.blur_sigma.is_finite() || self.blur_sigma < 0.0 {
            return bad(format!("blur sigma must be >= 0, got {}", self.blur_sigma));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return bad(format!("noise sigma must be >= 0, got {}", self.noise_sigma));
        }
        let min_dim = self.width.min(self.height) as f64;
        if 4.0 * self.blur_sigma >= min_dim / 2.0 {
            return Err(Error::BlurTooLarge {
                sigma: self.blur_sigma,
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// `sin θ` and `cos θ` with exact zeros at the axis angles.
fn unit_normal(angle: f64) -> (f64, f64) {
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    (snap(angle.sin()), snap(angle.cos()))
}

/// Renders the edge by point-sampling the blurred profile at pixel centers.
pub fn render(target: &EdgeTarget) -> Result<Image> {
    target.validate()?;
    let (sin, cos) = unit_normal(target.edge_angle);
    let xc = (target.width as f64 - 1.0) / 2.0;
    let yc = (target.height as f64 - 1.0) / 2.0;
    let span = target.high - target.low;
    let sigma = target.blur_sigma;
    let mut img = Image::from_fn(target.width, target.height, |r, c| {
        let d = (c as f64 - xc) * sin + (r as f64 - yc) * cos - target.edge_offset;
        let frac = if sigma == 0.0 {
            if d >= 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            normal_cdf(d / sigma)
        };
        target.low + span * frac
    });
    if target.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(target.seed);
        let normal = Normal::new(0.0, target.noise_sigma)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let noisy: Vec<f64> = img
            .pixels()
            .iter()
            .map(|v| v + normal.sample(&mut rng))
            .collect();
        img = Image::new(target.width, target.height, noisy)?;
    }
    Ok(img)
}

/// `exp(−2π²σ²f²)`, the transform of a unit-area Gaussian LSF.
pub fn analytic_gaussian_mtf(sigma: f64, f: f64) -> f64 {
    (-2.0 * PI * PI * sigma * sigma * f * f).exp()
}

/// `sin(πf) / (πf)`, with `sinc(0) = 1`.
pub fn sinc(f: f64) -> f64 {
    if f == 0.0 {
        1.0
    } else {
        (PI * f).sin() / (PI * f)
    }
}

/// Gaussian MTF times the `|sinc|` factor from unit-pixel differencing.
pub fn sampled_model_mtf(sigma: f64, f: f64) -> f64 {
    analytic_gaussian_mtf(sigma, f) * sinc(f).abs()
}

/// Frequency where `exp(−2π²σ²f²) = 0.5`, i.e. `sqrt(ln 2 / (2π²)) / σ`.
/// `None` for an unblurred target, whose model MTF never drops.
pub fn analytic_mtf50(sigma: f64) -> Option<f64> {
    (sigma > 0.0).then(|| (LN_2 / (2.0 * PI * PI)).sqrt() / sigma)
}
