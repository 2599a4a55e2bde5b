use super::Image;
use crate::error::{Error, Result};

/// Decodes a PNG and converts it to luminance with `Y = 0.299 R + 0.587 G + 0.114 B`.
///
/// Gray PNGs keep their stored sample values (8- or 16-bit).
pub fn load_png(bytes: &[u8]) -> Result<Image> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::UnsupportedFormat(format!("png: {e}")))?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let pixels: Vec<f64> = match decoded {
        image::DynamicImage::ImageLuma8(buf) => buf.pixels().map(|p| f64::from(p.0[0])).collect(),
        image::DynamicImage::ImageLuma16(buf) => {
            buf.pixels().map(|p| f64::from(p.0[0])).collect()
        }
        image::DynamicImage::ImageRgb16(_) | image::DynamicImage::ImageRgba16(_) => decoded
            .to_rgb16()
            .pixels()
            .map(|p| luminance(p.0.map(f64::from)))
            .collect(),
        other => other
            .to_rgb8()
            .pixels()
            .map(|p| luminance(p.0.map(f64::from)))
            .collect(),
    };
    Image::new(w, h, pixels)
}

fn luminance([r, g, b]: [f64; 3]) -> f64 {
    0.299 * r + 0.587 * g + 0.114 * b
}
