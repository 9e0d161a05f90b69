//! Integer-wavelet SIM: per-sub-band frequency-ranked substitution into
//! low-popcount codes of 8, 9 or 10 bits.
//!
//! # Stream format
//!
//! For an H x W secret the stream is the concatenation of four blocks in the
//! fixed order LL, LH, HL, HH. The LL band lies in [0,255] and reuses the
//! spatial SIM block (9-bit count, count x 8-bit values, then (H/2)(W/2)
//! 8-bit codes). Each high band block is:
//!
//! ```text
//! 1  bit   format flag: 0 = SI1 (<= 256 distinct values), 1 = SI2
//! 11 bits  band minimum m, two's complement
//! SI1: 2 bits width indicator (00/01/10 -> 8/9/10), 9 bits value count C
//! SI2: 1 bit width indicator (0/1 -> 9/10), 10 bits value count C
//! C x width   shifted coefficient values, most frequent first
//! (H/2)(W/2) x width   coefficient codes, row-major
//! ```
//!
//! The minimum is stored in 11 bits because the HH band can reach -510,
//! beyond any 8-bit field; the documented maxima below account for this.
//! Within a band, coefficients are shifted by -m, ranked by descending
//! frequency (ties by ascending shifted value), and rank i is written as the
//! i-th code of the width's partition list. Ranking codes on the decoder side
//! by descending frequency with ties by ascending partition rank reproduces
//! the encoder's assignment exactly.

use crate::bitstream::{BitStream, BitStreamError};
use crate::image::GrayImage;
use crate::iwt::{self, IwtError, SubBands};
use crate::sim::{self, SimError};
use thiserror::Error;

/// Fixed header bits of an SI2 high-band block: flag + m + width indicator + C.
const SI2_HEADER_BITS: usize = 1 + 11 + 1 + 10;

/// Worst-case side information for a band whose values need 9 bits
/// (LH and HL: at most 511 distinct shifted values).
pub const BAND9_SIDE_MAX_BITS: usize = SI2_HEADER_BITS + 511 * 9;
/// Worst-case side information for a band whose values need 10 bits
/// (HH: at most 1021 distinct shifted values).
pub const BAND10_SIDE_MAX_BITS: usize = SI2_HEADER_BITS + 1021 * 10;
/// Worst-case total side information across the four bands.
pub const SIDE_INFO_MAX_BITS: usize =
    sim::SIDE_INFO_MAX_BITS + 2 * BAND9_SIDE_MAX_BITS + BAND10_SIDE_MAX_BITS;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IwsimError {
    #[error("invalid width indicator {0}")]
    BadWidthIndicator(u32),
    #[error("invalid coefficient value count {0}")]
    BadValueCount(u32),
    #[error(
        "side information declares {declared} coefficient values but the codes use {observed}"
    )]
    ValueCountMismatch { declared: usize, observed: usize },
    #[error("coefficient {value} outside band range {lo}..={hi}")]
    CoefficientOutOfRange { value: i32, lo: i32, hi: i32 },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Stream(#[from] BitStreamError),
    #[error(transparent)]
    Iwt(#[from] IwtError),
}

/// The 2^b codes of width b in {8,9,10}, grouped by ascending popcount with
/// ties by ascending value. The 8-bit list equals the SIM codebook order.
pub struct WidePartition {
    codes: [Vec<u16>; 3],
    rank: [Vec<u16>; 3],
}

impl WidePartition {
    pub fn new() -> Self {
        let build = |width: usize| -> (Vec<u16>, Vec<u16>) {
            let mut codes: Vec<u16> = (0..1u32 << width).map(|v| v as u16).collect();
            codes.sort_by_key(|&v| (v.count_ones(), v));
            let mut rank = vec![0u16; 1 << width];
            for (i, &c) in codes.iter().enumerate() {
                rank[c as usize] = i as u16;
            }
            (codes, rank)
        };
        let (c8, r8) = build(8);
        let (c9, r9) = build(9);
        let (c10, r10) = build(10);
        WidePartition {
            codes: [c8, c9, c10],
            rank: [r8, r9, r10],
        }
    }

    pub fn codes(&self, width: usize) -> &[u16] {
        &self.codes[width - 8]
    }

    pub fn rank(&self, width: usize, code: u16) -> usize {
        self.rank[width - 8][code as usize] as usize
    }
}

impl Default for WidePartition {
    fn default() -> Self {
        WidePartition::new()
    }
}

/// Encoded stream plus the accounting the bench needs.
pub struct IwsimEncoding {
    pub stream: BitStream,
    pub side_bits: usize,
    pub code_bits: usize,
    pub code_zero_bits: usize,
}

fn bits_needed(v: u32) -> usize {
    (32 - v.leading_zeros()).max(1) as usize
}

fn encode_band(coeffs: &[i32], part: &WidePartition, out: &mut BitStream) -> (usize, usize, usize) {
    let m = *coeffs.iter().min().expect("band is nonempty");
    let shifted: Vec<u32> = coeffs.iter().map(|&c| (c - m) as u32).collect();
    let max_shift = *shifted.iter().max().unwrap();
    let width = bits_needed(max_shift).max(8);
    debug_assert!(width <= 10);

    let mut counts = vec![0u32; max_shift as usize + 1];
    for &s in &shifted {
        counts[s as usize] += 1;
    }
    let mut ranked: Vec<u32> = (0..=max_shift)
        .filter(|&v| counts[v as usize] > 0)
        .collect();
    ranked.sort_by(|&a, &b| counts[b as usize].cmp(&counts[a as usize]).then(a.cmp(&b)));
    let c = ranked.len();

    let side_start = out.len();
    let si2 = c > 256;
    out.push_bit(u8::from(si2));
    out.write_field((m & 0x7FF) as u32, 11).unwrap();
    if si2 {
        out.write_field((width - 9) as u32, 1).unwrap();
        out.write_field(c as u32, 10).unwrap();
    } else {
        out.write_field((width - 8) as u32, 2).unwrap();
        out.write_field(c as u32, 9).unwrap();
    }
    for &v in &ranked {
        out.write_field(v, width).unwrap();
    }
    let side_bits = out.len() - side_start;

    let mut rank_of = vec![0u16; max_shift as usize + 1];
    for (rank, &v) in ranked.iter().enumerate() {
        rank_of[v as usize] = rank as u16;
    }
    let codes = part.codes(width);
    let code_start = out.len();
    let zeros_before = out.zero_count();
    for &s in &shifted {
        out.write_field(u32::from(codes[rank_of[s as usize] as usize]), width)
            .unwrap();
    }
    (
        side_bits,
        out.len() - code_start,
        out.zero_count() - zeros_before,
    )
}

fn decode_band(
    stream: &mut BitStream,
    part: &WidePartition,
    n_coeffs: usize,
    range: (i32, i32),
) -> Result<Vec<i32>, IwsimError> {
    let si2 = stream.read_bit()? == 1;
    let raw_m = stream.read_field(11)? as i32;
    let m = if raw_m & 0x400 != 0 {
        raw_m - 0x800
    } else {
        raw_m
    };
    let (width, c) = if si2 {
        let w = 9 + stream.read_field(1)? as usize;
        let c = stream.read_field(10)?;
        if c <= 256 || c > 1021 {
            return Err(IwsimError::BadValueCount(c));
        }
        (w, c as usize)
    } else {
        let indicator = stream.read_field(2)?;
        if indicator > 2 {
            return Err(IwsimError::BadWidthIndicator(indicator));
        }
        let c = stream.read_field(9)?;
        if c == 0 || c > 256 {
            return Err(IwsimError::BadValueCount(c));
        }
        (8 + indicator as usize, c as usize)
    };

    let mut values = Vec::with_capacity(c);
    for _ in 0..c {
        values.push(stream.read_field(width)?);
    }
    if (stream.remaining() as u64) < (n_coeffs as u64) * width as u64 {
        return Err(IwsimError::Stream(BitStreamError::StreamExhausted));
    }
    let mut codes = Vec::with_capacity(n_coeffs);
    let mut counts = vec![0u32; 1 << width];
    for _ in 0..n_coeffs {
        let code = stream.read_field(width)? as u16;
        counts[code as usize] += 1;
        codes.push(code);
    }

    let mut observed: Vec<u16> = (0..1u32 << width)
        .map(|v| v as u16)
        .filter(|&v| counts[v as usize] > 0)
        .collect();
    observed.sort_by(|&a, &b| {
        counts[b as usize]
            .cmp(&counts[a as usize])
            .then(part.rank(width, a).cmp(&part.rank(width, b)))
    });
    if observed.len() != c {
        return Err(IwsimError::ValueCountMismatch {
            declared: c,
            observed: observed.len(),
        });
    }
    let mut restore = vec![0i32; 1 << width];
    for (rank, &code) in observed.iter().enumerate() {
        let value = values[rank] as i32 + m;
        if value < range.0 || value > range.1 {
            return Err(IwsimError::CoefficientOutOfRange {
                value,
                lo: range.0,
                hi: range.1,
            });
        }
        restore[code as usize] = value;
    }
    Ok(codes.iter().map(|&c| restore[c as usize]).collect())
}

/// Encode a secret image, returning the stream and its accounting.
pub fn iwsim_encode(secret: &GrayImage) -> IwsimEncoding {
    let part = WidePartition::new();
    let bands = iwt::haar_forward(secret);

    let ll_plane: Vec<u8> = bands.ll.iter().map(|&v| v as u8).collect();
    let sim_enc = sim::encode_plane(&ll_plane);

    let mut stream = BitStream::new();
    stream.append(&sim_enc.side_info);
    stream.append(&sim_enc.payload);
    let mut side_bits = sim_enc.side_info.len();
    let mut code_bits = sim_enc.payload.len();
    let mut code_zero_bits = sim_enc.payload.zero_count();

    for band in [&bands.lh, &bands.hl, &bands.hh] {
        let (side, codes, zeros) = encode_band(band, &part, &mut stream);
        side_bits += side;
        code_bits += codes;
        code_zero_bits += zeros;
    }
    IwsimEncoding {
        stream,
        side_bits,
        code_bits,
        code_zero_bits,
    }
}

/// Full transform stream for a secret image.
pub fn iwsim_forward(secret: &GrayImage) -> BitStream {
    iwsim_encode(secret).stream
}

/// Parse a stream produced by [`iwsim_forward`] for the given dimensions and
/// reconstruct the secret exactly. Reads from the stream cursor.
pub fn iwsim_inverse(
    stream: &mut BitStream,
    height: usize,
    width: usize,
) -> Result<GrayImage, IwsimError> {
    let part = WidePartition::new();
    let (hh2, ww2) = (height / 2, width / 2);
    let n = hh2 * ww2;

    let values = sim::read_side(stream)?;
    let codes = sim::read_codes(stream, n)?;
    let ll_plane = sim::assemble(&values, &codes)?;

    let lh = decode_band(stream, &part, n, (-255, 255))?;
    let hl = decode_band(stream, &part, n, (-255, 255))?;
    let hh = decode_band(stream, &part, n, (-510, 510))?;

    let bands = SubBands {
        ll: ll_plane.iter().map(|&v| i32::from(v)).collect(),
        lh,
        hl,
        hh,
        half_height: hh2,
        half_width: ww2,
        source_height: height,
        source_width: width,
    };
    Ok(iwt::haar_inverse(&bands)?)
}

/// Total side-information bits across the four band blocks.
pub fn iwsim_overhead(secret: &GrayImage) -> usize {
    iwsim_encode(secret).side_bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn partition_structure() {
        let part = WidePartition::new();
        let book = sim::SimCodebook::new();
        for width in 8..=10usize {
            let codes = part.codes(width);
            assert_eq!(codes.len(), 1 << width);
            let mut sizes = vec![0u64; width + 1];
            for &c in codes {
                sizes[c.count_ones() as usize] += 1;
            }
            for (i, &size) in sizes.iter().enumerate() {
                assert_eq!(size, binomial(width as u64, i as u64));
            }
        }
        let eight: Vec<u8> = part.codes(8).iter().map(|&c| c as u8).collect();
        assert_eq!(&eight, book.codes());
    }

    #[test]
    fn constant_image_block_layout() {
        let img = GrayImage::new(4, 4, vec![50; 16]).unwrap();
        let enc = iwsim_encode(&img);
        // LL is constant: 17-bit SIM side info. Each high band is all zero:
        // flag + m + indicator + C + one 8-bit value.
        assert_eq!(enc.side_bits, 17 + 3 * (1 + 11 + 2 + 9 + 8));
        assert_eq!(iwsim_overhead(&img), 110);
        // 4 coefficients of 8 bits per band
        assert_eq!(enc.code_bits, 4 * 4 * 8);
        assert_eq!(enc.code_zero_bits, enc.code_bits);

        let mut stream = enc.stream.clone();
        assert_eq!(iwsim_inverse(&mut stream, 4, 4).unwrap(), img);
    }

    #[test]
    fn round_trip_on_random_and_natural_images() {
        for seed in 0..200u64 {
            let img = fixtures::random(seed, 8, 8);
            let mut stream = iwsim_forward(&img);
            assert_eq!(
                iwsim_inverse(&mut stream, 8, 8).unwrap(),
                img,
                "seed {seed}"
            );
        }
        for seed in 0..10u64 {
            let img = fixtures::natural(seed, 32, 64);
            let mut stream = iwsim_forward(&img);
            assert_eq!(iwsim_inverse(&mut stream, 32, 64).unwrap(), img);
        }
    }

    #[test]
    fn payload_zero_floor() {
        for seed in 0..100u64 {
            let img = fixtures::random(seed, 8, 8);
            let enc = iwsim_encode(&img);
            let ratio = enc.code_zero_bits as f64 / enc.code_bits as f64;
            assert!(ratio >= 0.5, "seed {seed}: {ratio}");
        }
    }

    #[test]
    fn natural_images_beat_spatial_sim() {
        for seed in 0..5u64 {
            let img = fixtures::natural(seed, 64, 64);
            let enc = iwsim_encode(&img);
            let iwsim_ratio = enc.code_zero_bits as f64 / enc.code_bits as f64;
            let (_, sim_ratio) = sim::sim_zero_gain(&img);
            assert!(
                iwsim_ratio > sim_ratio,
                "seed {seed}: {iwsim_ratio} vs {sim_ratio}"
            );
        }
    }

    #[test]
    fn overhead_stays_under_field_maxima() {
        for seed in 0..20u64 {
            let img = fixtures::random(seed, 64, 64);
            assert!(iwsim_overhead(&img) <= SIDE_INFO_MAX_BITS);
        }
        let natural = fixtures::natural(11, 512, 512);
        let enc = iwsim_encode(&natural);
        assert!((enc.side_bits as f64) < 0.02 * enc.code_bits as f64);
    }

    #[test]
    fn flipped_format_bit_is_a_parse_error() {
        let img = fixtures::natural(2, 16, 16);
        let enc = iwsim_encode(&img);
        // find the first high-band flag: right after the LL block
        let ll_bits = {
            let sim_enc = sim::encode_plane(
                &iwt::haar_forward(&img)
                    .ll
                    .iter()
                    .map(|&v| v as u8)
                    .collect::<Vec<u8>>(),
            );
            sim_enc.side_info.len() + sim_enc.payload.len()
        };
        let mut corrupted = BitStream::new();
        for i in 0..enc.stream.len() {
            let bit = enc.stream.bit(i);
            corrupted.push_bit(if i == ll_bits { bit ^ 1 } else { bit });
        }
        assert!(iwsim_inverse(&mut corrupted, 16, 16).is_err());
    }

    #[test]
    fn self_delimiting_with_trailing_garbage() {
        let img = fixtures::random(9, 8, 8);
        let mut stream = iwsim_forward(&img);
        let parsed_len = stream.len();
        stream.write_field(0b101010, 6).unwrap();
        assert_eq!(iwsim_inverse(&mut stream, 8, 8).unwrap(), img);
        assert_eq!(stream.remaining(), stream.len() - parsed_len);
    }
}
