//! Edge profile → line spread → modulation transfer.
//!
//! The ESF is sampled across the selected edge with each row registered on the
//! chain column, the LSF is its first difference, and the MTF is the magnitude
//! of the LSF's DFT normalized to 1 at DC.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::Image;
use crate::segment::EdgeSegment;

pub const DEFAULT_HALF_WINDOW: usize = 8;

/// Edge spread function samples, `spacing` pixels apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsfProfile {
    pub samples: Vec<f64>,
    pub spacing: f64,
}

/// Line spread function samples, `spacing` pixels apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsfProfile {
    pub samples: Vec<f64>,
    pub spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MtfPoint {
    /// Cycles per pixel.
    pub frequency: f64,
    pub modulation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtfCurve {
    pub points: Vec<MtfPoint>,
}

impl MtfCurve {
    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.frequency)
    }

    pub fn modulations(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.modulation)
    }
}

/// Finite-difference scheme used to derive the LSF.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LsfMethod {
    /// `ESF[i+1] − ESF[i]`, N − 1 samples.
    #[default]
    Forward,
    /// `(ESF[i+1] − ESF[i−1]) / 2`, N − 2 samples.
    Central,
}

/// Averages `img(r, c_r + d)` over the segment's rows for `d ∈ [−hw, hw]`,
/// where `c_r` is the chain column at row `r`.
pub fn extract_esf(img: &Image, seg: &EdgeSegment, half_window: usize) -> Result<EsfProfile> {
    if half_window < 2 {
        return Err(Error::InvalidParameter(format!(
            "half_window must be at least 2, got {half_window}"
        )));
    }
    if seg.length < 2 || seg.columns.len() < 2 {
        return Err(Error::ProfileTooShort {
            needed: 2,
            got: seg.columns.len(),
        });
    }
    let n = 2 * half_window + 1;
    let mut sums = vec![0.0; n];
    for (i, &c) in seg.columns.iter().enumerate() {
        let r = seg.start.row + i;
        if r >= img.height() || c < half_window || c + half_window >= img.width() {
            return Err(Error::EsfWindow(format!(
                "row {r}, column {c} with half-window {half_window} on a {}x{} image; \
                 try a smaller half-window",
                img.width(),
                img.height()
            )));
        }
        let row = img.row(r);
        for (k, s) in sums.iter_mut().enumerate() {
            *s += row[c - half_window + k];
        }
    }
    let rows = seg.columns.len() as f64;
    Ok(EsfProfile {
        samples: sums.into_iter().map(|s| s / rows).collect(),
        spacing: 1.0,
    })
}

pub fn lsf_from_esf(esf: &EsfProfile) -> Result<LsfProfile> {
    lsf_from_esf_with(esf, LsfMethod::Forward)
}

pub fn lsf_from_esf_with(esf: &EsfProfile, method: LsfMethod) -> Result<LsfProfile> {
    if esf.samples.len() < 4 {
        return Err(Error::ProfileTooShort {
            needed: 4,
            got: esf.samples.len(),
        });
    }
    if esf.spacing.is_nan() || esf.spacing <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sample spacing must be positive, got {}",
            esf.spacing
        )));
    }
    let s = &esf.samples;
    let samples = match method {
        LsfMethod::Forward => s.windows(2).map(|w| (w[1] - w[0]) / esf.spacing).collect(),
        LsfMethod::Central => s
            .windows(3)
            .map(|w| (w[2] - w[0]) / (2.0 * esf.spacing))
            .collect(),
    };
    Ok(LsfProfile {
        samples,
        spacing: esf.spacing,
    })
}

/// `|Σ_k lsf[k] e^{−2πi u k / N}|` for `u = 0..=N/2`, divided by the DC term.
pub fn mtf_from_lsf(lsf: &LsfProfile) -> Result<MtfCurve> {
    let n = lsf.samples.len();
    if n < 3 {
        return Err(Error::ProfileTooShort { needed: 3, got: n });
    }
    let dc: f64 = lsf.samples.iter().sum();
    if dc == 0.0 {
        return Err(Error::ZeroDc);
    }
    let dc = dc.abs();
    let points = (0..=n / 2)
        .map(|u| {
            let (mut re, mut im) = (0.0, 0.0);
            for (k, &v) in lsf.samples.iter().enumerate() {
                // reduce u·k mod N first to keep the phase argument small
                let phase = -2.0 * PI * ((u * k) % n) as f64 / n as f64;
                re += v * phase.cos();
                im += v * phase.sin();
            }
            MtfPoint {
                frequency: u as f64 / (n as f64 * lsf.spacing),
                modulation: if u == 0 { 1.0 } else { re.hypot(im) / dc },
            }
        })
        .collect();
    Ok(MtfCurve { points })
}

/// Lowest frequency where the modulation falls to 0.5, linearly interpolated.
/// `None` when the curve never reaches 0.5.
pub fn mtf50(curve: &MtfCurve) -> Option<f64> {
    curve.points.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        (a.modulation > 0.5 && b.modulation <= 0.5).then(|| {
            a.frequency
                + (a.modulation - 0.5) / (a.modulation - b.modulation) * (b.frequency - a.frequency)
        })
    })
}
