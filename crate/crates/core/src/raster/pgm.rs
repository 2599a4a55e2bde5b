//! Netpbm graymap codec: binary (P5) and plain (P2), maxval up to 65535.

use std::fs::File;
use std::io::{Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use super::{Image, Rect, TileSource};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Magic {
    Plain,
    Binary,
}

#[derive(Debug, Clone, Copy)]
struct Header {
    magic: Magic,
    width: usize,
    height: usize,
    maxval: u32,
    /// Byte offset of the first sample (P5) or of the first sample token (P2).
    payload: usize,
}

impl Header {
    fn bytes_per_sample(&self) -> usize {
        if self.maxval < 256 {
            1
        } else {
            2
        }
    }
}

/// Splits the next whitespace-delimited header token, skipping `#` comments.
fn next_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' && bytes[*pos] != b'\r' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::MalformedHeader("unexpected end of header".into()));
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

fn parse_field(token: &str, name: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| Error::MalformedHeader(format!("invalid {name} {token:?}")))
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let magic = match bytes.get(..2) {
        Some(b"P5") => Magic::Binary,
        Some(b"P2") => Magic::Plain,
        Some(other) => {
            return Err(Error::UnsupportedFormat(format!(
                "magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
        None => return Err(Error::MalformedHeader("missing magic number".into())),
    };
    let mut pos = 2;
    if pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
        return Err(Error::UnsupportedFormat("magic must be followed by whitespace".into()));
    }
    let width = parse_field(&next_token(bytes, &mut pos)?, "width")?;
    let height = parse_field(&next_token(bytes, &mut pos)?, "height")?;
    let maxval = parse_field(&next_token(bytes, &mut pos)?, "maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::MalformedHeader(format!("maxval {maxval} outside 1..=65535")));
    }
    // exactly one whitespace byte separates maxval from a binary raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        Some(_) => return Err(Error::MalformedHeader("junk after maxval".into())),
        None if magic == Magic::Binary => {
            return Err(Error::TruncatedData {
                expected: width * height,
                found: 0,
            })
        }
        None => {}
    }
    Ok(Header {
        magic,
        width,
        height,
        maxval: maxval as u32,
        payload: pos,
    })
}

fn decode_binary(payload: &[u8], bytes_per_sample: usize, count: usize) -> Result<Vec<f64>> {
    let available = payload.len() / bytes_per_sample;
    if available < count {
        return Err(Error::TruncatedData {
            expected: count,
            found: available,
        });
    }
    let samples = if bytes_per_sample == 1 {
        payload[..count].iter().map(|&b| f64::from(b)).collect()
    } else {
        payload[..count * 2]
            .chunks_exact(2)
            .map(|p| f64::from(u16::from_be_bytes([p[0], p[1]])))
            .collect()
    };
    Ok(samples)
}

/// Decodes a P5 or P2 graymap. Samples keep their stored values; nothing is rescaled.
pub fn load_pgm(bytes: &[u8]) -> Result<Image> {
    let header = parse_header(bytes)?;
    let count = header.width * header.height;
    let pixels = match header.magic {
        Magic::Binary => decode_binary(&bytes[header.payload..], header.bytes_per_sample(), count)?,
        Magic::Plain => {
            let mut pos = header.payload;
            let mut pixels = Vec::with_capacity(count);
            for _ in 0..count {
                let token = match next_token(bytes, &mut pos) {
                    Ok(t) => t,
                    Err(_) => {
                        return Err(Error::TruncatedData {
                            expected: count,
                            found: pixels.len(),
                        })
                    }
                };
                let v = token
                    .parse::<u32>()
                    .map_err(|_| Error::MalformedHeader(format!("invalid sample {token:?}")))?;
                if v > header.maxval {
                    return Err(Error::MalformedHeader(format!(
                        "sample {v} exceeds maxval {}",
                        header.maxval
                    )));
                }
                pixels.push(f64::from(v));
            }
            pixels
        }
    };
    Image::new(header.width, header.height, pixels)
}

/// Encodes `img` as binary P5. Intensities are clamped to `[0, maxval]` and rounded.
///
/// `maxval` must be 255 (one byte per sample) or 65535 (two bytes, big-endian).
pub fn write_pgm(img: &Image, maxval: u32) -> Result<Vec<u8>> {
    let bytes_per_sample = match maxval {
        255 => 1,
        65535 => 2,
        other => {
            return Err(Error::InvalidParameter(format!(
                "maxval must be 255 or 65535, got {other}"
            )))
        }
    };
    let header = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval);
    let mut out = Vec::with_capacity(header.len() + img.pixels().len() * bytes_per_sample);
    out.extend_from_slice(header.as_bytes());
    let top = f64::from(maxval);
    for &v in img.pixels() {
        let q = v.clamp(0.0, top).round() as u16;
        if bytes_per_sample == 1 {
            out.push(q as u8);
        } else {
            out.extend_from_slice(&q.to_be_bytes());
        }
    }
    Ok(out)
}

/// A PGM file opened for windowed reads.
///
/// P5 rasters are read row by row with seeks, so only the requested window is
/// ever resident. P2 files carry no fixed sample offsets and are decoded whole.
#[derive(Debug)]
pub struct PgmFile {
    path: PathBuf,
    header: Header,
    plain: Option<Image>,
}

impl PgmFile {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut file = File::open(&path)?;
        // Headers are tiny; 4 KiB covers any sane amount of comments.
        let mut head = Vec::with_capacity(4096);
        (&mut file).take(4096).read_to_end(&mut head)?;
        let header = parse_header(&head)?;
        let plain = match header.magic {
            Magic::Plain => Some(load_pgm(&std::fs::read(&path)?)?),
            Magic::Binary => {
                let needed = header.payload
                    + header.width * header.height * header.bytes_per_sample();
                let len = file.metadata()?.len() as usize;
                if len < needed {
                    return Err(Error::TruncatedData {
                        expected: header.width * header.height,
                        found: len.saturating_sub(header.payload) / header.bytes_per_sample(),
                    });
                }
                None
            }
        };
        Ok(Self {
            path,
            header,
            plain,
        })
    }

    pub fn maxval(&self) -> u32 {
        self.header.maxval
    }

    pub fn read_all(&self) -> Result<Image> {
        self.read_window(Rect::new(0, 0, self.header.height, self.header.width))
    }
}

impl TileSource for PgmFile {
    fn dimensions(&self) -> (usize, usize) {
        (self.header.width, self.header.height)
    }

    fn read_window(&self, rect: Rect) -> Result<Image> {
        if let Some(img) = &self.plain {
            return img.crop_rect(rect);
        }
        let h = &self.header;
        if rect.width == 0 || rect.height == 0 || rect.bottom() > h.height || rect.right() > h.width {
            return Err(Error::WindowOutOfBounds {
                top: rect.top,
                left: rect.left,
                height: rect.height,
                width: rect.width,
                image_height: h.height,
                image_width: h.width,
            });
        }
        let bps = h.bytes_per_sample();
        let mut file = File::open(&self.path)?;
        let mut row_buf = vec![0u8; rect.width * bps];
        let mut pixels = Vec::with_capacity(rect.area());
        for r in rect.top..rect.bottom() {
            let offset = h.payload + (r * h.width + rect.left) * bps;
            file.seek(SeekFrom::Start(offset as u64))?;
            file.read_exact(&mut row_buf)?;
            pixels.extend(decode_binary(&row_buf, bps, rect.width)?);
        }
        Image::new(rect.width, rect.height, pixels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_binary_8bit() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 128, 255, 64]);
        let img = load_pgm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.pixels(), &[0.0, 128.0, 255.0, 64.0]);
    }

    #[test]
    fn decodes_plain() {
        let img = load_pgm(b"P2 1 1 255 7").unwrap();
        assert_eq!((img.width(), img.height()), (1, 1));
        assert_eq!(img.pixels(), &[7.0]);
    }

    #[test]
    fn decodes_plain_with_comments() {
        let img = load_pgm(b"P2\n# made by hand\n2 1 # trailing\n1000\n999 3\n").unwrap();
        assert_eq!(img.pixels(), &[999.0, 3.0]);
    }

    #[test]
    fn decodes_binary_16bit_big_endian() {
        let mut bytes = b"P5 2 1 65535\n".to_vec();
        bytes.extend_from_slice(&[0x01, 0x02, 0xff, 0xff]);
        let img = load_pgm(&bytes).unwrap();
        assert_eq!(img.pixels(), &[258.0, 65535.0]);
    }

    #[test]
    fn truncated_payload_is_reported() {
        let mut bytes = b"P5\n4 4\n255\n".to_vec();
        bytes.extend_from_slice(&[0u8; 8]);
        assert!(matches!(
            load_pgm(&bytes),
            Err(Error::TruncatedData {
                expected: 16,
                found: 8
            })
        ));
        assert!(matches!(
            load_pgm(b"P2 2 2 255 1 2 3"),
            Err(Error::TruncatedData { .. })
        ));
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(matches!(load_pgm(b"P6 1 1 255 \0\0\0"), Err(Error::UnsupportedFormat(_))));
        assert!(matches!(load_pgm(b"P5 x 1 255 \0"), Err(Error::MalformedHeader(_))));
        assert!(matches!(load_pgm(b"P5 1 1 70000 \0\0"), Err(Error::MalformedHeader(_))));
        assert!(matches!(load_pgm(b"P5 0 1 255 "), Err(Error::MalformedHeader(_))));
        assert!(load_pgm(b"P").is_err());
        assert!(load_pgm(b"P2 1 1 10 11").is_err());
    }

    #[test]
    fn write_roundtrip_8bit() {
        let img = Image::new(1, 1, vec![7.0]).unwrap();
        let bytes = write_pgm(&img, 255).unwrap();
        assert!(bytes.starts_with(b"P5"));
        assert_eq!(load_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn write_clamps_and_rounds() {
        let img = Image::new(3, 1, vec![300.0, -4.0, 2.5]).unwrap();
        let back = load_pgm(&write_pgm(&img, 255).unwrap()).unwrap();
        assert_eq!(back.pixels(), &[255.0, 0.0, 3.0]);
    }

    #[test]
    fn write_16bit_is_big_endian() {
        let img = Image::new(2, 1, vec![0.0, 65535.0]).unwrap();
        let bytes = write_pgm(&img, 65535).unwrap();
        assert_eq!(&bytes[bytes.len() - 4..], &[0x00, 0x00, 0xff, 0xff]);
        assert_eq!(load_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn write_rejects_odd_maxval() {
        let img = Image::filled(1, 1, 0.0);
        assert!(write_pgm(&img, 1023).is_err());
    }

    #[test]
    fn file_windows_match_in_memory_crop() {
        let img = Image::from_fn(37, 23, |r, c| ((r * 131 + c * 17) % 60000) as f64);
        let dir = tempfile::tempdir().unwrap();
        for maxval in [255, 65535] {
            let src = img.map(|v| v.min(f64::from(maxval)));
            let path = dir.path().join(format!("t{maxval}.pgm"));
            std::fs::write(&path, write_pgm(&src, maxval).unwrap()).unwrap();
            let file = PgmFile::open(&path).unwrap();
            assert_eq!(file.dimensions(), (37, 23));
            let rect = Rect::new(4, 9, 11, 20);
            assert_eq!(file.read_window(rect).unwrap(), src.crop_rect(rect).unwrap());
            assert_eq!(file.read_all().unwrap(), src);
            assert!(file.read_window(Rect::new(20, 0, 5, 5)).is_err());
        }
    }

    #[test]
    fn file_open_detects_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("short.pgm");
        let mut bytes = b"P5\n4 4\n255\n".to_vec();
        bytes.extend_from_slice(&[0u8; 8]);
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(PgmFile::open(&path), Err(Error::TruncatedData { .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn roundtrip_integer_images(
                w in 1usize..9, h in 1usize..9, wide in any::<bool>(), seed in any::<u64>()
            ) {
                let maxval = if wide { 65535u32 } else { 255 };
                let img = Image::from_fn(w, h, |r, c| {
                    let x = seed.wrapping_mul(6364136223846793005).wrapping_add((r * 31 + c) as u64);
                    (x >> 33) as f64 % f64::from(maxval + 1)
                });
                let back = load_pgm(&write_pgm(&img, maxval).unwrap()).unwrap();
                prop_assert_eq!(back, img);
            }
        }
    }
}
