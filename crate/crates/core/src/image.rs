//! 8-bit grayscale images with binary PGM (P5) I/O.
//!
//! Images are immutable after construction and must have even dimensions of
//! at least 2x2: the level-1 wavelet halves each axis and the pixel-pair
//! baselines consume pixels two at a time, so odd sizes are rejected up
//! front instead of being padded (padding would silently shift the very
//! statistics the detectors measure).

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("not a binary PGM: missing \"P5\" magic")]
    BadMagic,
    #[error("malformed PGM header: {0}")]
    BadHeader(&'static str),
    #[error("unsupported maxval {0}: only 255 is accepted")]
    MaxvalUnsupported(u32),
    #[error("pixel data truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("dimensions {height}x{width}: both axes must be even")]
    OddDimension { height: usize, width: usize },
    #[error("dimensions {height}x{width}: minimum size is 2x2")]
    TooSmall { height: usize, width: usize },
    #[error("pixel buffer holds {found} bytes but {expected} were declared")]
    PixelCountMismatch { expected: usize, found: usize },
}

/// Row-major 8-bit single-channel raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    height: usize,
    width: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(height: usize, width: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if height < 2 || width < 2 {
            return Err(ImageError::TooSmall { height, width });
        }
        if height % 2 != 0 || width % 2 != 0 {
            return Err(ImageError::OddDimension { height, width });
        }
        let expected = height
            .checked_mul(width)
            .ok_or(ImageError::BadHeader("dimension product overflows"))?;
        if pixels.len() != expected {
            return Err(ImageError::PixelCountMismatch {
                expected,
                found: pixels.len(),
            });
        }
        Ok(GrayImage {
            height,
            width,
            pixels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    /// Every pixel v replaced by 255 - v. Involutive.
    pub fn complement(&self) -> GrayImage {
        GrayImage {
            height: self.height,
            width: self.width,
            pixels: self.pixels.iter().map(|&v| 255 - v).collect(),
        }
    }

    pub fn histogram(&self) -> Histogram {
        let mut counts = [0u64; 256];
        for &v in &self.pixels {
            counts[v as usize] += 1;
        }
        Histogram { counts }
    }

    /// Decode a binary PGM ("P5", maxval 255). The header is the magic
    /// followed by three whitespace-separated decimal fields and a single
    /// whitespace byte before the raw pixel data. Comments are not supported.
    pub fn from_pgm(bytes: &[u8]) -> Result<Self, ImageError> {
        if bytes.len() < 2 || &bytes[..2] != b"P5" {
            return Err(ImageError::BadMagic);
        }
        let mut pos = 2;
        let mut fields = [0usize; 3];
        for field in fields.iter_mut() {
            let start_ws = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos == start_ws {
                return Err(ImageError::BadHeader("missing whitespace separator"));
            }
            let start = pos;
            let mut value: usize = 0;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                value = value
                    .checked_mul(10)
                    .and_then(|v| v.checked_add((bytes[pos] - b'0') as usize))
                    .ok_or(ImageError::BadHeader("header field overflows"))?;
                pos += 1;
            }
            if pos == start {
                return Err(ImageError::BadHeader("expected decimal field"));
            }
            *field = value;
        }
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(ImageError::BadHeader("missing separator before pixel data"));
        }
        pos += 1;
        let [width, height, maxval] = fields;
        if maxval != 255 {
            return Err(ImageError::MaxvalUnsupported(maxval as u32));
        }
        if height < 2 || width < 2 {
            return Err(ImageError::TooSmall { height, width });
        }
        if height % 2 != 0 || width % 2 != 0 {
            return Err(ImageError::OddDimension { height, width });
        }
        let expected = height
            .checked_mul(width)
            .ok_or(ImageError::BadHeader("dimension product overflows"))?;
        let data = &bytes[pos..];
        if data.len() < expected {
            return Err(ImageError::Truncated {
                expected,
                found: data.len(),
            });
        }
        GrayImage::new(height, width, data[..expected].to_vec())
    }

    /// Encode as binary PGM with the fixed header `P5\n<width> <height>\n255\n`.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Per-intensity pixel counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; 256],
}

impl Histogram {
    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn count(&self, value: u8) -> u64 {
        self.counts[value as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}
