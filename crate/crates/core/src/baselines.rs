//! Reference LSB schemes: replacement (LSBR), matching (LSBM), and matching
//! revisited (LSBMR).
//!
//! All three walk the cover in the keyed pseudo-random order over every
//! raster index. LSBMR skips saturated pixels (0 and 255) and pairs the
//! remaining ones two at a time; embedding never creates a saturated value,
//! so the receiver's skip rule selects exactly the same pixels. In the rare
//! corner where Mielikainen's forced choice would saturate the first pixel
//! of a pair, the embedder moves it the other way and adjusts the second
//! pixel instead, trading the at-most-one-change property for exact
//! extraction on that pair.

use crate::bitstream::BitStream;
use crate::image::GrayImage;
use crate::rng::{self, Xoshiro256StarStar};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BaselineError {
    #[error("payload needs {required_bits} bits but the cover offers {available_bits}")]
    CapacityExceeded {
        required_bits: usize,
        available_bits: usize,
    },
    #[error("LSBMR payloads must have even length, got {0} bits")]
    OddPayloadLength(usize),
}

fn full_order(seed: u64, n: usize) -> Vec<u32> {
    let mut rng = Xoshiro256StarStar::from_seed(seed);
    rng::shuffled_indices(&mut rng, n)
}

/// Replace the binary LSB of each visited pixel with the payload bit.
pub fn lsbr_embed(
    cover: &GrayImage,
    payload: &BitStream,
    seed: u64,
) -> Result<GrayImage, BaselineError> {
    let n = cover.pixels().len();
    if payload.len() > n {
        return Err(BaselineError::CapacityExceeded {
            required_bits: payload.len(),
            available_bits: n,
        });
    }
    let order = full_order(seed, n);
    let mut pixels = cover.pixels().to_vec();
    for k in 0..payload.len() {
        let idx = order[k] as usize;
        pixels[idx] = (pixels[idx] & !1) | payload.bit(k);
    }
    Ok(GrayImage::new(cover.height(), cover.width(), pixels).unwrap())
}

/// Read `n_bits` binary LSBs along the traversal. Inverts both LSBR and LSBM.
pub fn lsbr_extract(
    stego: &GrayImage,
    n_bits: usize,
    seed: u64,
) -> Result<BitStream, BaselineError> {
    let n = stego.pixels().len();
    if n_bits > n {
        return Err(BaselineError::CapacityExceeded {
            required_bits: n_bits,
            available_bits: n,
        });
    }
    let order = full_order(seed, n);
    let mut bits = BitStream::new();
    for &idx in order.iter().take(n_bits) {
        bits.push_bit(stego.pixels()[idx as usize] & 1);
    }
    Ok(bits)
}

/// Where the payload bit disagrees with the pixel LSB, move the pixel by a
/// generator-chosen +-1 (forced inward at 0 and 255). The +-1 draws come from
/// the same stream that shuffled the pixels.
pub fn lsbm_embed(
    cover: &GrayImage,
    payload: &BitStream,
    seed: u64,
) -> Result<GrayImage, BaselineError> {
    let n = cover.pixels().len();
    if payload.len() > n {
        return Err(BaselineError::CapacityExceeded {
            required_bits: payload.len(),
            available_bits: n,
        });
    }
    let mut rng = Xoshiro256StarStar::from_seed(seed);
    let order = rng::shuffled_indices(&mut rng, n);
    let mut pixels = cover.pixels().to_vec();
    for k in 0..payload.len() {
        let idx = order[k] as usize;
        let v = pixels[idx];
        if v & 1 == payload.bit(k) {
            continue;
        }
        let next = match v {
            0 => 1,
            255 => 254,
            _ => {
                if rng.next_bit() {
                    v + 1
                } else {
                    v - 1
                }
            }
        };
        pixels[idx] = next;
    }
    Ok(GrayImage::new(cover.height(), cover.width(), pixels).unwrap())
}

fn lsb(v: i32) -> u8 {
    (v & 1) as u8
}

/// Step a pixel by +-1 without saturating; prefers the generator's draw.
fn step_avoiding_saturation(v: i32, rng: &mut Xoshiro256StarStar) -> i32 {
    let d = if rng.next_bit() { 1 } else { -1 };
    let candidate = v + d;
    if candidate == 0 || candidate == 255 {
        v - d
    } else {
        candidate
    }
}

/// Mielikainen pair embedding: two bits per pixel pair, usually changing at
/// most one pixel of the pair by one.
pub fn lsbmr_embed(
    cover: &GrayImage,
    payload: &BitStream,
    seed: u64,
) -> Result<GrayImage, BaselineError> {
    if payload.len() % 2 != 0 {
        return Err(BaselineError::OddPayloadLength(payload.len()));
    }
    let n = cover.pixels().len();
    let mut rng = Xoshiro256StarStar::from_seed(seed);
    let order = rng::shuffled_indices(&mut rng, n);
    let usable: Vec<usize> = order
        .iter()
        .map(|&i| i as usize)
        .filter(|&i| {
            let v = cover.pixels()[i];
            v != 0 && v != 255
        })
        .collect();
    let capacity = (usable.len() / 2) * 2;
    if payload.len() > capacity {
        return Err(BaselineError::CapacityExceeded {
            required_bits: payload.len(),
            available_bits: capacity,
        });
    }

    let mut pixels = cover.pixels().to_vec();
    for (pair, chunk) in usable.chunks_exact(2).enumerate() {
        let k = pair * 2;
        if k >= payload.len() {
            break;
        }
        let (i1, i2) = (chunk[0], chunk[1]);
        let m1 = payload.bit(k);
        let m2 = payload.bit(k + 1);
        let mut x1 = i32::from(pixels[i1]);
        let mut x2 = i32::from(pixels[i2]);

        if m1 == lsb(x1) {
            if m2 != lsb(x1 / 2 + x2) {
                x2 = step_avoiding_saturation(x2, &mut rng);
            }
        } else {
            let down_matches = m2 == lsb((x1 - 1) / 2 + x2);
            let candidate = if down_matches { x1 - 1 } else { x1 + 1 };
            if candidate == 0 || candidate == 255 {
                // go the other way and repair m2 through the second pixel
                x1 = if down_matches { x1 + 1 } else { x1 - 1 };
                x2 = step_avoiding_saturation(x2, &mut rng);
            } else {
                x1 = candidate;
            }
        }
        debug_assert_eq!(lsb(x1), m1);
        debug_assert_eq!(lsb(x1 / 2 + x2), m2);
        debug_assert!(x1 > 0 && x1 < 255 && x2 > 0 && x2 < 255);
        pixels[i1] = x1 as u8;
        pixels[i2] = x2 as u8;
    }
    Ok(GrayImage::new(cover.height(), cover.width(), pixels).unwrap())
}

/// Read `n_bits` from the stego by re-deriving the pairing.
pub fn lsbmr_extract(
    stego: &GrayImage,
    n_bits: usize,
    seed: u64,
) -> Result<BitStream, BaselineError> {
    if n_bits % 2 != 0 {
        return Err(BaselineError::OddPayloadLength(n_bits));
    }
    let n = stego.pixels().len();
    let mut rng = Xoshiro256StarStar::from_seed(seed);
    let order = rng::shuffled_indices(&mut rng, n);
    let usable: Vec<usize> = order
        .iter()
        .map(|&i| i as usize)
        .filter(|&i| {
            let v = stego.pixels()[i];
            v != 0 && v != 255
        })
        .collect();
    let capacity = (usable.len() / 2) * 2;
    if n_bits > capacity {
        return Err(BaselineError::CapacityExceeded {
            required_bits: n_bits,
            available_bits: capacity,
        });
    }
    let mut bits = BitStream::new();
    for chunk in usable.chunks_exact(2).take(n_bits / 2) {
        let x1 = i32::from(stego.pixels()[chunk[0]]);
        let x2 = i32::from(stego.pixels()[chunk[1]]);
        bits.push_bit(lsb(x1));
        bits.push_bit(lsb(x1 / 2 + x2));
    }
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rng::Xoshiro256StarStar;

    fn random_bits(seed: u64, n: usize) -> BitStream {
        let mut rng = Xoshiro256StarStar::from_seed(seed);
        let mut bits = BitStream::new();
        for _ in 0..n {
            bits.push_bit(u8::from(rng.next_bit()));
        }
        bits
    }

    #[test]
    fn lsbr_round_trip_and_noop_bits() {
        let cover = fixtures::natural(1, 64, 64);
        let payload = random_bits(2, 3000);
        let stego = lsbr_embed(&cover, &payload, 7).unwrap();
        assert_eq!(lsbr_extract(&stego, 3000, 7).unwrap(), payload);

        // embedding each pixel's own LSB changes nothing
        let mut own = BitStream::new();
        let order = full_order(7, cover.pixels().len());
        for &idx in &order {
            own.push_bit(cover.pixels()[idx as usize] & 1);
        }
        assert_eq!(lsbr_embed(&cover, &own, 7).unwrap(), cover);
    }

    #[test]
    fn lsbm_round_trip_and_range() {
        let cover = fixtures::with_saturation(3, 64, 64, 0.05);
        let payload = random_bits(4, 4096);
        let stego = lsbm_embed(&cover, &payload, 9).unwrap();
        assert_eq!(lsbr_extract(&stego, 4096, 9).unwrap(), payload);
        // implicit: all pixels stayed valid u8, enforced by construction
        let changed = cover
            .pixels()
            .iter()
            .zip(stego.pixels())
            .filter(|(a, b)| a != b)
            .count();
        assert!(changed > 0);
        assert!(cover
            .pixels()
            .iter()
            .zip(stego.pixels())
            .all(|(&a, &b)| (i32::from(a) - i32::from(b)).abs() <= 1));
    }

    #[test]
    fn lsbm_has_no_pair_asymmetry() {
        // On a constant cover LSBR can only move 128 up to 129, while LSBM
        // spreads mismatches evenly onto 127 and 129.
        let cover = fixtures::constant(128, 128, 128);
        let payload = random_bits(5, 16384);
        let lsbr = lsbr_embed(&cover, &payload, 11).unwrap();
        let hist_r = lsbr.histogram();
        assert_eq!(hist_r.count(127), 0);
        assert!(hist_r.count(129) > 7000);

        let lsbm = lsbm_embed(&cover, &payload, 11).unwrap();
        let hist_m = lsbm.histogram();
        let down = hist_m.count(127) as f64;
        let up = hist_m.count(129) as f64;
        let total = down + up;
        // binomial balance within 5 sigma
        let sigma = (total * 0.25).sqrt();
        assert!((down - up).abs() < 5.0 * sigma, "{down} vs {up}");
    }

    #[test]
    fn lsbmr_round_trip_without_saturated_pixels() {
        let cover = fixtures::natural(6, 64, 64);
        let payload = random_bits(7, 4000);
        let stego = lsbmr_embed(&cover, &payload, 13).unwrap();
        assert_eq!(lsbmr_extract(&stego, 4000, 13).unwrap(), payload);
    }

    #[test]
    fn lsbmr_round_trip_with_saturated_pixels() {
        let cover = fixtures::with_saturation(8, 64, 64, 0.05);
        let payload = random_bits(9, 3000);
        let stego = lsbmr_embed(&cover, &payload, 17).unwrap();
        assert_eq!(lsbmr_extract(&stego, 3000, 17).unwrap(), payload);
        // untouched saturated pixels remain, and no new ones appear
        let cover_sat = cover
            .pixels()
            .iter()
            .filter(|&&v| v == 0 || v == 255)
            .count();
        let stego_sat = stego
            .pixels()
            .iter()
            .filter(|&&v| v == 0 || v == 255)
            .count();
        assert_eq!(cover_sat, stego_sat);
    }

    #[test]
    fn lsbmr_handles_near_saturated_corner() {
        // many pixels at 1 and 254 force the corner rule often
        let mut pixels = Vec::with_capacity(64 * 64);
        for i in 0..64 * 64 {
            pixels.push(match i % 4 {
                0 => 1,
                1 => 254,
                2 => 100,
                _ => 101,
            });
        }
        let cover = GrayImage::new(64, 64, pixels).unwrap();
        let payload = random_bits(10, 4000);
        let stego = lsbmr_embed(&cover, &payload, 19).unwrap();
        assert_eq!(lsbmr_extract(&stego, 4000, 19).unwrap(), payload);
        assert!(stego.pixels().iter().all(|&v| v != 0 && v != 255));
    }

    #[test]
    fn lsbmr_capacity_accounts_for_saturation() {
        let cover = fixtures::with_saturation(11, 64, 64, 0.05);
        let usable = cover
            .pixels()
            .iter()
            .filter(|&&v| v != 0 && v != 255)
            .count();
        let too_big = random_bits(12, usable + 2 - (usable % 2));
        match lsbmr_embed(&cover, &too_big, 1) {
            Err(BaselineError::CapacityExceeded { available_bits, .. }) => {
                assert_eq!(available_bits, (usable / 2) * 2);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
        assert!(matches!(
            lsbmr_embed(&cover, &random_bits(13, 3), 1),
            Err(BaselineError::OddPayloadLength(3))
        ));
    }
}
