//! Deterministic test and demo images.
//!
//! Real photographic corpora are not bundled; these generators produce small
//! stand-ins with the properties the experiments need: smooth "natural"
//! images with broad histograms and parity-neutral noise, uniform random
//! images, ramps, constants, and covers with a controlled saturated-pixel
//! fraction.

use crate::image::GrayImage;
use crate::rng::Xoshiro256StarStar;
use std::io;
use std::path::Path;

/// Every pixel set to `value`.
pub fn constant(value: u8, height: usize, width: usize) -> GrayImage {
    GrayImage::new(height, width, vec![value; height * width]).unwrap()
}

/// Row-major ramp cycling through 0..=255.
pub fn ramp(height: usize, width: usize) -> GrayImage {
    let pixels = (0..height * width).map(|i| (i % 256) as u8).collect();
    GrayImage::new(height, width, pixels).unwrap()
}

/// Uniform iid pixels.
pub fn random(seed: u64, height: usize, width: usize) -> GrayImage {
    let mut rng = Xoshiro256StarStar::from_seed(seed);
    let pixels = (0..height * width).map(|_| rng.next_u64() as u8).collect();
    GrayImage::new(height, width, pixels).unwrap()
}

fn unit(rng: &mut Xoshiro256StarStar) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn bilinear_field(
    rng: &mut Xoshiro256StarStar,
    cell: usize,
    amplitude: f64,
    height: usize,
    width: usize,
) -> Vec<f64> {
    let grid_h = height / cell + 2;
    let grid_w = width / cell + 2;
    let grid: Vec<f64> = (0..grid_h * grid_w)
        .map(|_| unit(rng) * amplitude)
        .collect();
    let mut out = vec![0.0; height * width];
    for i in 0..height {
        let gy = i / cell;
        let fy = (i % cell) as f64 / cell as f64;
        for j in 0..width {
            let gx = j / cell;
            let fx = (j % cell) as f64 / cell as f64;
            let top = grid[gy * grid_w + gx] * (1.0 - fx) + grid[gy * grid_w + gx + 1] * fx;
            let bottom =
                grid[(gy + 1) * grid_w + gx] * (1.0 - fx) + grid[(gy + 1) * grid_w + gx + 1] * fx;
            out[i * width + j] = top * (1.0 - fy) + bottom * fy;
        }
    }
    out
}

/// Smooth photographic stand-in: bilinear detail at three scales, summed and
/// dither-quantized. Neighboring pixels stay close, pixel parity is unbiased,
/// and nothing saturates (values lie in [25, 226]).
pub fn natural(seed: u64, height: usize, width: usize) -> GrayImage {
    let mut rng = Xoshiro256StarStar::from_seed(seed ^ 0x9E3779B97F4A7C15);
    let coarse = bilinear_field(&mut rng, 64, 150.0, height, width);
    let mid = bilinear_field(&mut rng, 16, 40.0, height, width);
    let fine = bilinear_field(&mut rng, 4, 10.0, height, width);
    let mut pixels = Vec::with_capacity(height * width);
    for k in 0..height * width {
        let base = 25.0 + coarse[k] + mid[k] + fine[k];
        pixels.push((base + unit(&mut rng)).floor() as u8);
    }
    GrayImage::new(height, width, pixels).unwrap()
}

/// Cartoon-like scene: constant 16x16 tiles from a small per-image palette,
/// with a fraction of tiles replaced by smooth ramps. Flat regions give the
/// histogram stable peaks that survive down-sampling, the way large
/// same-shade objects do in photographs.
pub fn scene(seed: u64, height: usize, width: usize) -> GrayImage {
    const CELL: usize = 16;
    const LEVELS: usize = 24;
    const RAMP_FRACTION: f64 = 0.3;
    let mut rng = Xoshiro256StarStar::from_seed(seed ^ 0x517C_C1B7_2722_0A95);
    let palette: Vec<f64> = (0..LEVELS).map(|_| 25.0 + unit(&mut rng) * 206.0).collect();
    let grid_h = height / CELL + 2;
    let grid_w = width / CELL + 2;
    let tiles: Vec<f64> = (0..grid_h * grid_w)
        .map(|_| palette[rng.next_below(LEVELS as u64) as usize])
        .collect();
    let ramp_tile: Vec<bool> = (0..grid_h * grid_w)
        .map(|_| unit(&mut rng) < RAMP_FRACTION)
        .collect();
    let mut pixels = Vec::with_capacity(height * width);
    for i in 0..height {
        for j in 0..width {
            let (gy, gx) = (i / CELL, j / CELL);
            let t = gy * grid_w + gx;
            let value = if ramp_tile[t] {
                let fy = (i % CELL) as f64 / CELL as f64;
                let fx = (j % CELL) as f64 / CELL as f64;
                let top = tiles[t] * (1.0 - fx) + tiles[t + 1] * fx;
                let bottom = tiles[t + grid_w] * (1.0 - fx) + tiles[t + grid_w + 1] * fx;
                (top * (1.0 - fy) + bottom * fy + unit(&mut rng)).floor()
            } else {
                tiles[t].floor()
            };
            pixels.push(value as u8);
        }
    }
    GrayImage::new(height, width, pixels).unwrap()
}

/// A natural image with exactly `floor(fraction * pixels)` values forced to
/// 0 or 255, spread evenly over the raster.
pub fn with_saturation(seed: u64, height: usize, width: usize, fraction: f64) -> GrayImage {
    let base = natural(seed, height, width);
    let n = height * width;
    let count = (fraction * n as f64).floor() as usize;
    let mut pixels = base.pixels().to_vec();
    if count > 0 {
        let stride = n / count;
        for k in 0..count {
            pixels[k * stride] = if k % 2 == 0 { 0 } else { 255 };
        }
    }
    GrayImage::new(height, width, pixels).unwrap()
}

/// Write the demo corpus (12 images) into `dir`, returning the file names.
pub fn write_demo_corpus(dir: &Path) -> io::Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut entries: Vec<(String, GrayImage)> = Vec::new();
    for (k, seed) in (1u64..=4).enumerate() {
        entries.push((format!("natural_{:02}.pgm", k + 1), natural(seed, 256, 256)));
    }
    entries.push(("scene_01.pgm".into(), scene(5, 256, 256)));
    entries.push(("scene_02.pgm".into(), scene(6, 256, 256)));
    entries.push(("natural_big.pgm".into(), natural(7, 512, 512)));
    entries.push(("random_01.pgm".into(), random(101, 128, 128)));
    entries.push(("random_02.pgm".into(), random(102, 128, 128)));
    entries.push(("ramp.pgm".into(), ramp(128, 128)));
    entries.push(("constant_128.pgm".into(), constant(128, 64, 64)));
    entries.push((
        "saturated_048.pgm".into(),
        with_saturation(8, 512, 512, 0.048),
    ));

    let mut names = Vec::new();
    for (name, img) in entries {
        std::fs::write(dir.join(&name), img.to_pgm())?;
        names.push(name);
    }
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(natural(3, 64, 64), natural(3, 64, 64));
        assert_eq!(random(3, 16, 16), random(3, 16, 16));
        assert_ne!(natural(3, 64, 64), natural(4, 64, 64));
    }

    #[test]
    fn natural_images_avoid_saturation() {
        let img = natural(1, 128, 128);
        assert!(img.pixels().iter().all(|&v| (25..=226).contains(&v)));
        let img = scene(1, 128, 128);
        assert!(img.pixels().iter().all(|&v| (25..=231).contains(&v)));
    }

    #[test]
    fn saturation_fraction_is_exact() {
        let img = with_saturation(5, 128, 128, 0.048);
        let saturated = img.pixels().iter().filter(|&&v| v == 0 || v == 255).count();
        assert_eq!(saturated, (0.048f64 * 128.0 * 128.0).floor() as usize);
    }

    #[test]
    fn ramp_covers_all_values_evenly() {
        let img = ramp(128, 128);
        let hist = img.histogram();
        assert!(hist.counts().iter().all(|&c| c == 64));
    }
}
