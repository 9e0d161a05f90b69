//! Embedding efficiency, capacity, PSNR, and the theoretical change
//! probability model.

use crate::image::GrayImage;
use crate::iwsim;
use crate::sim;
use crate::stego;
use crate::Method;

/// Everything the bench reports about one embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedStats {
    pub payload_bits: usize,
    pub modified_pixels: usize,
    pub total_pixels: usize,
    pub ee: f64,
    pub psnr_db: f64,
    pub capacity_fraction: f64,
}

impl EmbedStats {
    pub fn measure(
        cover: &GrayImage,
        stego: &GrayImage,
        payload_bits: usize,
        capacity_fraction: f64,
    ) -> EmbedStats {
        EmbedStats {
            payload_bits,
            modified_pixels: modified_pixels(cover, stego),
            total_pixels: cover.pixels().len(),
            ee: embedding_efficiency(cover, stego, payload_bits),
            psnr_db: psnr(cover, stego),
            capacity_fraction,
        }
    }
}

/// Number of pixels whose value differs between the two images.
pub fn modified_pixels(cover: &GrayImage, stego: &GrayImage) -> usize {
    assert_eq!(cover.height(), stego.height());
    assert_eq!(cover.width(), stego.width());
    cover
        .pixels()
        .iter()
        .zip(stego.pixels())
        .filter(|(a, b)| a != b)
        .count()
}

/// Embedded bits per modified pixel. Infinite when nothing changed.
pub fn embedding_efficiency(cover: &GrayImage, stego: &GrayImage, payload_bits: usize) -> f64 {
    assert!(payload_bits >= 1);
    let modified = modified_pixels(cover, stego);
    if modified == 0 {
        f64::INFINITY
    } else {
        payload_bits as f64 / modified as f64
    }
}

/// Probability that a visited pixel changes, given the zero ratio of the
/// payload and the zero-LSB ratio of the working cover: one minus the match
/// probability.
pub fn expected_change_prob(r0: f64, r0_cover: f64) -> f64 {
    1.0 - (r0 * r0_cover + (1.0 - r0) * (1.0 - r0_cover))
}

/// Peak signal-to-noise ratio in decibels. Infinite for identical images.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> f64 {
    assert_eq!(a.height(), b.height());
    assert_eq!(a.width(), b.width());
    let sse: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return f64::INFINITY;
    }
    let mse = sse as f64 / (a.pixels().len() as f64);
    10.0 * (255.0f64 * 255.0 / mse).log10()
}

/// Fraction of the cover usable for secret bits.
///
/// For the mapping pipelines this is a worst-case figure: the embedded
/// stream must fit in N-1 pixels after the 32-bit header and the maximum
/// possible side information, and the wavelet pipelines spend up to
/// (8+9+9+10)/4 = 9 stream bits per 8 secret bits.
pub fn capacity(method: Method, cover: &GrayImage) -> f64 {
    let n = cover.pixels().len();
    match method {
        Method::Lsbr | Method::Lsbm => 1.0,
        Method::Lsbmr => {
            let usable = cover
                .pixels()
                .iter()
                .filter(|&&v| v != 0 && v != 255)
                .count();
            usable as f64 / n as f64
        }
        Method::EbSim => {
            let budget = n.saturating_sub(1 + stego::HEADER_BITS + sim::SIDE_INFO_MAX_BITS);
            budget as f64 / n as f64
        }
        Method::EbIwsim | Method::FibIwsim | Method::LIwsim => {
            let budget = n.saturating_sub(1 + stego::HEADER_BITS + iwsim::SIDE_INFO_MAX_BITS);
            (budget as f64 * 8.0 / 9.0) / n as f64
        }
    }
}
