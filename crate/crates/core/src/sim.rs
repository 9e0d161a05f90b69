//! Secret Image Manipulation: histogram-rank substitution into low-popcount
//! codes.
//!
//! Pixel values are ranked by descending frequency and the rank-i value is
//! replaced by the i-th entry of a fixed codebook that lists all 256 byte
//! values grouped by ascending popcount. Frequent values therefore become
//! bytes with few 1 bits, which drives the payload's zero ratio up. The
//! original values travel in a small self-delimiting side-information block
//! (9-bit count, then one byte per value in rank order), so the transform is
//! lossless.
//!
//! Frequency ties are broken by ascending pixel value on the encoder side and
//! by ascending codebook rank on the decoder side; equal-frequency values get
//! consecutive ranks in ascending order under both rules, so the two ends
//! always agree.

use crate::bitstream::{BitStream, BitStreamError};
use crate::image::{GrayImage, ImageError};
use thiserror::Error;

/// Maximum side-information length in bits: 9 + 256 * 8.
pub const SIDE_INFO_MAX_BITS: usize = 9 + 256 * 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("payload holds {found} bits but {expected} were expected")]
    PayloadLengthMismatch { expected: usize, found: usize },
    #[error("side information declares zero values")]
    EmptyValueList,
    #[error("side information declares {0} values, more than 256")]
    InvalidValueCount(u32),
    #[error("side information declares {declared} values but the payload uses {observed}")]
    ValueCountMismatch { declared: usize, observed: usize },
    #[error(transparent)]
    Stream(#[from] BitStreamError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// All 256 byte values ordered by (popcount, value).
pub struct SimCodebook {
    codes: [u8; 256],
    rank_of: [u8; 256],
}

impl SimCodebook {
    pub fn new() -> Self {
        let mut codes: Vec<u8> = (0..=255).collect();
        codes.sort_by_key(|&v| (v.count_ones(), v));
        let mut rank_of = [0u8; 256];
        for (rank, &code) in codes.iter().enumerate() {
            rank_of[code as usize] = rank as u8;
        }
        let mut fixed = [0u8; 256];
        fixed.copy_from_slice(&codes);
        SimCodebook {
            codes: fixed,
            rank_of,
        }
    }

    pub fn codes(&self) -> &[u8; 256] {
        &self.codes
    }

    pub fn rank(&self, code: u8) -> usize {
        self.rank_of[code as usize] as usize
    }
}

impl Default for SimCodebook {
    fn default() -> Self {
        SimCodebook::new()
    }
}

/// Side-information stream and substituted-pixel payload, kept separate so
/// the embedding layer can account for them individually.
pub struct SimEncoding {
    pub side_info: BitStream,
    pub payload: BitStream,
}

/// Values present in a plane, most frequent first (ties by ascending value).
fn ranked_values(pixels: &[u8]) -> Vec<u8> {
    let mut counts = [0u64; 256];
    for &p in pixels {
        counts[p as usize] += 1;
    }
    let mut present: Vec<u8> = (0..=255).filter(|&v| counts[v as usize] > 0).collect();
    present.sort_by(|&a, &b| counts[b as usize].cmp(&counts[a as usize]).then(a.cmp(&b)));
    present
}

pub(crate) fn encode_plane(pixels: &[u8]) -> SimEncoding {
    let book = SimCodebook::new();
    let ranking = ranked_values(pixels);

    let mut substitute = [0u8; 256];
    for (rank, &value) in ranking.iter().enumerate() {
        substitute[value as usize] = book.codes[rank];
    }

    let mut side_info = BitStream::new();
    side_info
        .write_field(ranking.len() as u32, 9)
        .expect("count fits 9 bits");
    for &value in &ranking {
        side_info.write_field(u32::from(value), 8).unwrap();
    }

    let mut payload = BitStream::new();
    for &p in pixels {
        payload
            .write_field(u32::from(substitute[p as usize]), 8)
            .unwrap();
    }
    SimEncoding { side_info, payload }
}

/// Read the 9-bit count and the original value list from the cursor.
pub(crate) fn read_side(stream: &mut BitStream) -> Result<Vec<u8>, SimError> {
    let n = stream.read_field(9)?;
    if n == 0 {
        return Err(SimError::EmptyValueList);
    }
    if n > 256 {
        return Err(SimError::InvalidValueCount(n));
    }
    let mut values = Vec::with_capacity(n as usize);
    for _ in 0..n {
        values.push(stream.read_field(8)? as u8);
    }
    Ok(values)
}

/// Read `n_pixels` 8-bit codes from the cursor.
pub(crate) fn read_codes(stream: &mut BitStream, n_pixels: usize) -> Result<Vec<u8>, SimError> {
    if (stream.remaining() as u64) < 8 * n_pixels as u64 {
        return Err(SimError::Stream(BitStreamError::StreamExhausted));
    }
    let mut codes = Vec::with_capacity(n_pixels);
    for _ in 0..n_pixels {
        codes.push(stream.read_field(8)? as u8);
    }
    Ok(codes)
}

/// Undo the substitution: rank the observed codes and map rank i back to
/// `original_values[i]`.
pub(crate) fn assemble(original_values: &[u8], codes: &[u8]) -> Result<Vec<u8>, SimError> {
    let book = SimCodebook::new();
    let mut counts = [0u64; 256];
    for &c in codes {
        counts[c as usize] += 1;
    }
    let mut observed: Vec<u8> = (0..=255).filter(|&v| counts[v as usize] > 0).collect();
    observed.sort_by(|&a, &b| {
        counts[b as usize]
            .cmp(&counts[a as usize])
            .then(book.rank(a).cmp(&book.rank(b)))
    });
    if observed.len() != original_values.len() {
        return Err(SimError::ValueCountMismatch {
            declared: original_values.len(),
            observed: observed.len(),
        });
    }
    let mut restore = [0u8; 256];
    for (rank, &code) in observed.iter().enumerate() {
        restore[code as usize] = original_values[rank];
    }
    Ok(codes.iter().map(|&c| restore[c as usize]).collect())
}

/// Transform a secret image into (side information, payload).
pub fn sim_forward(secret: &GrayImage) -> SimEncoding {
    encode_plane(secret.pixels())
}

/// Reconstruct the secret exactly from the two streams.
pub fn sim_inverse(
    side_info: &mut BitStream,
    payload: &mut BitStream,
    height: usize,
    width: usize,
) -> Result<GrayImage, SimError> {
    let n_pixels = height * width;
    if payload.remaining() != 8 * n_pixels {
        return Err(SimError::PayloadLengthMismatch {
            expected: 8 * n_pixels,
            found: payload.remaining(),
        });
    }
    let values = read_side(side_info)?;
    let codes = read_codes(payload, n_pixels)?;
    let pixels = assemble(&values, &codes)?;
    Ok(GrayImage::new(height, width, pixels)?)
}

/// Zero ratio of the raw 8-bit stream vs. the SIM payload (side info
/// excluded).
pub fn sim_zero_gain(img: &GrayImage) -> (f64, f64) {
    let raw = BitStream::from_bytes(img.pixels());
    let enc = sim_forward(img);
    (
        raw.zero_ratio().expect("image is nonempty"),
        enc.payload.zero_ratio().expect("image is nonempty"),
    )
}
