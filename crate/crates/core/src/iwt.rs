//! Level-1 two-dimensional integer Haar transform (S-transform), exactly
//! invertible.
//!
//! The 1-D lifting pair is `low = floor((a + b) / 2)`, `high = a - b`, applied
//! to row pairs first and then to column pairs of each half. This variant
//! keeps the LL band inside [0, 255] so the spatial SIM codec can be reused
//! on it unchanged. Axis order is part of the wire contract.

use crate::image::GrayImage;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IwtError {
    #[error("band shapes are inconsistent")]
    ShapeMismatch,
    #[error("reconstructed pixel {value} at ({row},{col}) outside 0..=255")]
    CorruptBands { row: usize, col: usize, value: i32 },
}

/// The four level-1 sub-bands. LH holds (row-high, column-low), HL holds
/// (row-low, column-high). LL stays in [0,255], LH/HL in [-255,255], HH in
/// [-510,510].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubBands {
    pub ll: Vec<i32>,
    pub lh: Vec<i32>,
    pub hl: Vec<i32>,
    pub hh: Vec<i32>,
    pub half_height: usize,
    pub half_width: usize,
    pub source_height: usize,
    pub source_width: usize,
}

fn lift(a: i32, b: i32) -> (i32, i32) {
    ((a + b).div_euclid(2), a - b)
}

fn unlift(low: i32, high: i32) -> (i32, i32) {
    let a = low + (high + 1).div_euclid(2);
    (a, a - high)
}

pub fn haar_forward(img: &GrayImage) -> SubBands {
    let h = img.height();
    let w = img.width();
    let (hh2, ww2) = (h / 2, w / 2);

    // row pass
    let mut row_low = vec![0i32; h * ww2];
    let mut row_high = vec![0i32; h * ww2];
    for i in 0..h {
        for j in 0..ww2 {
            let a = i32::from(img.get(i, 2 * j));
            let b = i32::from(img.get(i, 2 * j + 1));
            let (low, high) = lift(a, b);
            row_low[i * ww2 + j] = low;
            row_high[i * ww2 + j] = high;
        }
    }

    // column pass on each half
    let mut bands = SubBands {
        ll: vec![0; hh2 * ww2],
        lh: vec![0; hh2 * ww2],
        hl: vec![0; hh2 * ww2],
        hh: vec![0; hh2 * ww2],
        half_height: hh2,
        half_width: ww2,
        source_height: h,
        source_width: w,
    };
    for i in 0..hh2 {
        for j in 0..ww2 {
            let (ll, hl) = lift(row_low[2 * i * ww2 + j], row_low[(2 * i + 1) * ww2 + j]);
            let (lh, hh) = lift(row_high[2 * i * ww2 + j], row_high[(2 * i + 1) * ww2 + j]);
            bands.ll[i * ww2 + j] = ll;
            bands.hl[i * ww2 + j] = hl;
            bands.lh[i * ww2 + j] = lh;
            bands.hh[i * ww2 + j] = hh;
        }
    }
    bands
}

pub fn haar_inverse(bands: &SubBands) -> Result<GrayImage, IwtError> {
    let (hh2, ww2) = (bands.half_height, bands.half_width);
    let n = hh2 * ww2;
    if bands.ll.len() != n
        || bands.lh.len() != n
        || bands.hl.len() != n
        || bands.hh.len() != n
        || bands.source_height != 2 * hh2
        || bands.source_width != 2 * ww2
    {
        return Err(IwtError::ShapeMismatch);
    }
    let h = bands.source_height;
    let w = bands.source_width;

    // undo the column pass
    let mut row_low = vec![0i32; h * ww2];
    let mut row_high = vec![0i32; h * ww2];
    for i in 0..hh2 {
        for j in 0..ww2 {
            let (a, b) = unlift(bands.ll[i * ww2 + j], bands.hl[i * ww2 + j]);
            row_low[2 * i * ww2 + j] = a;
            row_low[(2 * i + 1) * ww2 + j] = b;
            let (a, b) = unlift(bands.lh[i * ww2 + j], bands.hh[i * ww2 + j]);
            row_high[2 * i * ww2 + j] = a;
            row_high[(2 * i + 1) * ww2 + j] = b;
        }
    }

    // undo the row pass
    let mut pixels = vec![0u8; h * w];
    for i in 0..h {
        for j in 0..ww2 {
            let (a, b) = unlift(row_low[i * ww2 + j], row_high[i * ww2 + j]);
            for (col, value) in [(2 * j, a), (2 * j + 1, b)] {
                if !(0..=255).contains(&value) {
                    return Err(IwtError::CorruptBands { row: i, col, value });
                }
                pixels[i * w + col] = value as u8;
            }
        }
    }
    Ok(GrayImage::new(h, w, pixels).expect("dimensions come from a valid image"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn constant_image_annihilates_high_bands() {
        let img = GrayImage::new(2, 2, vec![10; 4]).unwrap();
        let bands = haar_forward(&img);
        assert_eq!(bands.ll, vec![10]);
        assert_eq!(bands.lh, vec![0]);
        assert_eq!(bands.hl, vec![0]);
        assert_eq!(bands.hh, vec![0]);
    }

    #[test]
    fn hand_worked_two_by_two() {
        // rows: (12,8) -> (10,4); (4,0) -> (2,4)
        // columns: lows (10,2) -> (6,8); highs (4,4) -> (4,0)
        let img = GrayImage::new(2, 2, vec![12, 8, 4, 0]).unwrap();
        let bands = haar_forward(&img);
        assert_eq!(bands.ll, vec![6]);
        assert_eq!(bands.hl, vec![8]);
        assert_eq!(bands.lh, vec![4]);
        assert_eq!(bands.hh, vec![0]);
        assert_eq!(haar_inverse(&bands).unwrap(), img);
    }

    #[test]
    fn band_ranges_hold_on_random_images() {
        for seed in 0..20u64 {
            let img = fixtures::random(seed, 64, 64);
            let bands = haar_forward(&img);
            assert!(bands.ll.iter().all(|&v| (0..=255).contains(&v)));
            assert!(bands.lh.iter().all(|&v| (-255..=255).contains(&v)));
            assert!(bands.hl.iter().all(|&v| (-255..=255).contains(&v)));
            assert!(bands.hh.iter().all(|&v| (-510..=510).contains(&v)));
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        for seed in 0..500u64 {
            let img = fixtures::random(seed, 8, 6);
            assert_eq!(haar_inverse(&haar_forward(&img)).unwrap(), img);
        }
    }

    #[test]
    fn forward_undoes_inverse_on_band_range() {
        for seed in 0..50u64 {
            let img = fixtures::random(seed, 16, 16);
            let bands = haar_forward(&img);
            let back = haar_forward(&haar_inverse(&bands).unwrap());
            assert_eq!(back, bands);
        }
    }

    #[test]
    fn corrupt_bands_are_reported() {
        let img = GrayImage::new(2, 2, vec![0, 0, 0, 0]).unwrap();
        let mut bands = haar_forward(&img);
        bands.hl[0] = 300; // impossible for an in-range image
        assert!(matches!(
            haar_inverse(&bands),
            Err(IwtError::CorruptBands { .. })
        ));

        let mut bands = haar_forward(&img);
        bands.hh.pop();
        assert_eq!(haar_inverse(&bands), Err(IwtError::ShapeMismatch));
    }
}
