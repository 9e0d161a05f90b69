//! Mapping-table embedding and extraction.
//!
//! A secret bit lands in a cover pixel by rewriting the three least
//! significant positions of the pixel's canonical decomposition through a
//! fixed table. Every output pattern is again the low end of a canonical
//! code, so every pixel stays usable, the embedded bit is always the
//! decomposition LSB of the stego pixel, and the pixel value moves by at
//! most 1 (Fibonacci) or 2 (Extended-Binary, Lucas).
//!
//! The embedded message is `16-bit secret height || 16-bit secret width ||
//! transform stream` and is written along a keyed pseudo-random pixel
//! traversal over all raster indices except the last one, whose binary LSB
//! carries the complement-form indicator. Before embedding, whichever of the
//! cover and its complement has the higher zero-LSB ratio is chosen as the
//! working image; the published stego is complemented back, so unvisited
//! pixels always match the cover.

use crate::bitstream::{BitStream, BitStreamError};
use crate::decomp::{DecompError, Scheme, SchemeId};
use crate::image::{GrayImage, ImageError};
use crate::iwsim::{self, IwsimError};
use crate::rng::{self, Xoshiro256StarStar};
use crate::sim::{self, SimError};
use thiserror::Error;

/// Bits of the embedded payload header (secret height and width).
pub const HEADER_BITS: usize = 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StegoError {
    #[error("payload needs {required_bits} bits but the cover offers {available_bits}")]
    CapacityExceeded {
        required_bits: usize,
        available_bits: usize,
    },
    #[error("low-bit pattern {0:03b} is not a row of the mapping table")]
    InvalidPattern(u8),
    #[error("scheme has no mapping table")]
    UnsupportedScheme,
    #[error("extracted secret dimensions {height}x{width} are invalid")]
    BadSecretDimensions { height: usize, width: usize },
    #[error(transparent)]
    Stream(#[from] BitStreamError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Iwsim(#[from] IwsimError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
}

/// The four mapping pipelines: secret transform paired with cover scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MappingMethod {
    /// SIM secret transform, Extended-Binary(3) cover decomposition.
    EbSim,
    /// IWSIM secret transform, Extended-Binary(3) cover decomposition.
    EbIwsim,
    /// IWSIM secret transform, Fibonacci cover decomposition.
    FibIwsim,
    /// IWSIM secret transform, Lucas cover decomposition.
    LIwsim,
}

impl MappingMethod {
    pub fn scheme(self) -> Scheme {
        match self {
            MappingMethod::EbSim | MappingMethod::EbIwsim => {
                Scheme::extended_binary(3).expect("3 is a valid extension")
            }
            MappingMethod::FibIwsim => Scheme::fibonacci(),
            MappingMethod::LIwsim => Scheme::lucas(),
        }
    }

    pub fn uses_iwsim(self) -> bool {
        !matches!(self, MappingMethod::EbSim)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EmbedConfig {
    pub method: MappingMethod,
    pub seed: u64,
}

/// Low-3-bit rewrite rules for one scheme. Patterns are 3-bit masks with bit
/// 0 holding the least significant position; a pattern decodes to secret bit
/// 1 exactly when its bit 0 is set.
pub struct MappingTable {
    rows: [Option<(u8, u8)>; 8],
}

impl MappingTable {
    /// Table for the scheme's reachable patterns. Only Fibonacci, Lucas and
    /// Extended-Binary(3) admit one.
    pub fn for_scheme(scheme: &Scheme) -> Result<MappingTable, StegoError> {
        let mut rows: [Option<(u8, u8)>; 8] = [None; 8];
        match scheme.id() {
            SchemeId::Fibonacci => {
                rows[0b000] = Some((0b000, 0b001));
                rows[0b001] = Some((0b010, 0b001));
                rows[0b010] = Some((0b010, 0b001));
                rows[0b100] = Some((0b100, 0b101));
                rows[0b101] = Some((0b100, 0b101));
            }
            SchemeId::ExtendedBinary(3) | SchemeId::Lucas => {
                // The Lucas row for (100, secret 1) outputs 001: the sum
                // 3 + 2 is not a canonical code, so mapping into it would
                // re-canonicalize with a carry and decode as 0.
                rows[0b000] = Some((0b000, 0b001));
                rows[0b001] = Some((0b010, 0b001));
                rows[0b010] = Some((0b010, 0b001));
                rows[0b100] = Some((0b100, 0b001));
            }
            _ => return Err(StegoError::UnsupportedScheme),
        }
        Ok(MappingTable { rows })
    }

    /// Output pattern for embedding `secret_bit` into `pattern`.
    pub fn map(&self, pattern: u8, secret_bit: u8) -> Result<u8, StegoError> {
        let (out0, out1) =
            self.rows[pattern as usize & 0b111].ok_or(StegoError::InvalidPattern(pattern))?;
        Ok(if secret_bit == 0 { out0 } else { out1 })
    }

    /// Secret bit carried by a pattern.
    pub fn decode(&self, pattern: u8) -> u8 {
        pattern & 1
    }

    /// Patterns that decode to secret bit 1.
    pub fn one_patterns(&self) -> Vec<u8> {
        (0u8..8)
            .filter(|&p| self.rows[p as usize].is_some() && p & 1 == 1)
            .collect()
    }
}

/// Embed one bit into one pixel value.
pub fn map_embed(
    scheme: &Scheme,
    table: &MappingTable,
    v: u8,
    secret_bit: u8,
) -> Result<u8, StegoError> {
    let pattern = scheme.low3(v);
    let out = table.map(pattern, secret_bit)?;
    if out == pattern {
        return Ok(v);
    }
    let base = i32::from(v) - i32::from(scheme.low3_value(pattern));
    let next = base + i32::from(scheme.low3_value(out));
    if (0..=255).contains(&next) && scheme.low3(next as u8) == out {
        return Ok(next as u8);
    }
    // Boundary repair: the table's Fibonacci row 001 -> 010 would carry 255
    // to 256. Fall back to the nearest in-range pattern with the same LSB
    // (255 becomes 254, pattern 000, change -1).
    let mut candidates: Vec<u8> = (0u8..8)
        .filter(|&p| p & 1 == secret_bit && p != out)
        .collect();
    candidates.sort_by_key(|&p| (i32::from(scheme.low3_value(p)) + base - i32::from(v)).abs());
    for candidate in candidates {
        let value = base + i32::from(scheme.low3_value(candidate));
        if (0..=255).contains(&value) && scheme.low3(value as u8) == candidate {
            return Ok(value as u8);
        }
    }
    Err(StegoError::InvalidPattern(pattern))
}

/// Keyed traversal over raster indices 0..n_pixels-2. The last index is
/// reserved for the indicator bit and never visited.
pub fn pixel_order(seed: u64, n_pixels: usize) -> Vec<u32> {
    assert!(n_pixels >= 2);
    let mut rng = Xoshiro256StarStar::from_seed(seed);
    rng::shuffled_indices(&mut rng, n_pixels - 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectForm {
    pub use_complement: bool,
    pub ratio: f64,
    pub ratio_complement: f64,
}

/// Choose between the cover and its complement: the form with the higher
/// zero-LSB ratio wins, with the cover kept on ties.
pub fn select_form(cover: &GrayImage, scheme: &Scheme) -> SelectForm {
    let ratio = scheme.zero_lsb_ratio(cover);
    let ratio_complement = scheme.zero_lsb_ratio(&cover.complement());
    SelectForm {
        use_complement: ratio_complement > ratio,
        ratio,
        ratio_complement,
    }
}

/// The working image's zero-LSB ratio after form selection.
pub fn working_zero_lsb_ratio(form: &SelectForm) -> f64 {
    form.ratio.max(form.ratio_complement)
}

/// Transform stream accounting used by the bench.
pub struct MessageStats {
    pub side_bits: usize,
    pub code_bits: usize,
}

/// Assemble the full embedded message for a secret: dimension header followed
/// by the transform stream.
pub fn build_message(
    secret: &GrayImage,
    method: MappingMethod,
) -> Result<(BitStream, MessageStats), StegoError> {
    if secret.height() > u16::MAX as usize || secret.width() > u16::MAX as usize {
        return Err(StegoError::BadSecretDimensions {
            height: secret.height(),
            width: secret.width(),
        });
    }
    let mut message = BitStream::new();
    message.write_field(secret.height() as u32, 16)?;
    message.write_field(secret.width() as u32, 16)?;
    let stats = if method.uses_iwsim() {
        let enc = iwsim::iwsim_encode(secret);
        message.append(&enc.stream);
        MessageStats {
            side_bits: enc.side_bits,
            code_bits: enc.code_bits,
        }
    } else {
        let enc = sim::sim_forward(secret);
        message.append(&enc.side_info);
        message.append(&enc.payload);
        MessageStats {
            side_bits: enc.side_info.len(),
            code_bits: enc.payload.len(),
        }
    };
    Ok((message, stats))
}

/// Embed an arbitrary bit-stream along the keyed traversal.
pub fn embed_bits(
    cover: &GrayImage,
    bits: &BitStream,
    scheme: &Scheme,
    table: &MappingTable,
    seed: u64,
) -> Result<GrayImage, StegoError> {
    let n = cover.pixels().len();
    let available = n - 1;
    if bits.len() > available {
        return Err(StegoError::CapacityExceeded {
            required_bits: bits.len(),
            available_bits: available,
        });
    }
    let form = select_form(cover, scheme);
    let mut work: Vec<u8> = if form.use_complement {
        cover.pixels().iter().map(|&v| 255 - v).collect()
    } else {
        cover.pixels().to_vec()
    };
    let order = pixel_order(seed, n);
    for (k, &idx) in order.iter().take(bits.len()).enumerate() {
        let idx = idx as usize;
        work[idx] = map_embed(scheme, table, work[idx], bits.bit(k))?;
    }
    if form.use_complement {
        for v in work.iter_mut() {
            *v = 255 - *v;
        }
    }
    work[n - 1] = (work[n - 1] & !1) | u8::from(form.use_complement);
    Ok(GrayImage::new(cover.height(), cover.width(), work)?)
}

/// Decode every carried bit: indicator first, complement if it says so, then
/// walk the traversal reading decomposition LSBs.
pub fn extract_bits(
    stego: &GrayImage,
    scheme: &Scheme,
    table: &MappingTable,
    seed: u64,
) -> BitStream {
    let n = stego.pixels().len();
    let indicator = stego.pixels()[n - 1] & 1;
    let work: Vec<u8> = if indicator == 1 {
        stego.pixels().iter().map(|&v| 255 - v).collect()
    } else {
        stego.pixels().to_vec()
    };
    let order = pixel_order(seed, n);
    let mut bits = BitStream::new();
    for &idx in &order {
        bits.push_bit(table.decode(scheme.low3(work[idx as usize])));
    }
    bits
}

/// Embed a secret image into a cover.
pub fn embed(
    cover: &GrayImage,
    secret: &GrayImage,
    cfg: &EmbedConfig,
) -> Result<GrayImage, StegoError> {
    let scheme = cfg.method.scheme();
    let table = MappingTable::for_scheme(&scheme)?;
    let (message, _) = build_message(secret, cfg.method)?;
    embed_bits(cover, &message, &scheme, &table, cfg.seed)
}

/// Recover the secret image from a stego produced with the same config.
pub fn extract(stego: &GrayImage, cfg: &EmbedConfig) -> Result<GrayImage, StegoError> {
    let scheme = cfg.method.scheme();
    let table = MappingTable::for_scheme(&scheme)?;
    let mut bits = extract_bits(stego, &scheme, &table, cfg.seed);
    let height = bits.read_field(16)? as usize;
    let width = bits.read_field(16)? as usize;
    if height < 2 || width < 2 || height % 2 != 0 || width % 2 != 0 {
        return Err(StegoError::BadSecretDimensions { height, width });
    }
    if cfg.method.uses_iwsim() {
        Ok(iwsim::iwsim_inverse(&mut bits, height, width)?)
    } else {
        let values = sim::read_side(&mut bits)?;
        let codes = sim::read_codes(&mut bits, height * width)?;
        let pixels = sim::assemble(&values, &codes)?;
        Ok(GrayImage::new(height, width, pixels)?)
    }
}
