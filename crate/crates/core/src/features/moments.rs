//! Block-wise LAB color moments.

use alloc::vec::Vec;

use super::color::rgb_to_lab;
use super::{FeatureKind, FeatureVector, RgbImage};
use crate::error::{Error, Result};

/// The image is cut into a `GRID × GRID` array of blocks.
pub const GRID: usize = 5;

/// Boundaries `round(i·len/GRID)` for `i = 0..=GRID`; every pixel lands in
/// exactly one block.
pub fn block_bounds(len: usize) -> [usize; GRID + 1] {
    let mut b = [0; GRID + 1];
    for (i, v) in b.iter_mut().enumerate() {
        // round(i·len/5), halves cannot occur since the divisor is odd.
        *v = (2 * i * len + GRID) / (2 * GRID);
    }
    b
}

/// 225-D descriptor: for each of the 25 blocks (row-major), for each LAB
/// channel, the mean, the standard deviation and the signed cube root of the
/// third central moment.
#[allow(clippy::needless_range_loop)]
pub fn color_moments(img: &RgbImage) -> Result<FeatureVector> {
    let (w, h) = (img.width(), img.height());
    if w < GRID || h < GRID {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            requirement: "at least 5x5 pixels",
        });
    }
    let lab: Vec<[f64; 3]> = img
        .pixels()
        .iter()
        .map(|&p| {
            let (l, a, b) = rgb_to_lab(p);
            [l, a, b]
        })
        .collect();
    let xb = block_bounds(w);
    let yb = block_bounds(h);
    let mut values = Vec::with_capacity(FeatureKind::Cm225.len());
    for by in 0..GRID {
        for bx in 0..GRID {
            let count = ((xb[bx + 1] - xb[bx]) * (yb[by + 1] - yb[by])) as f64;
            let pixels = || (yb[by]..yb[by + 1]).flat_map(move |y| (xb[bx]..xb[bx + 1]).map(move |x| y * w + x));
            for ch in 0..3 {
                // Shift by the block's first pixel so a flat block gives an
                // exact mean and exactly zero higher moments.
                let origin = lab[yb[by] * w + xb[bx]][ch];
                let mean = origin + pixels().map(|i| lab[i][ch] - origin).sum::<f64>() / count;
                let (mut m2, mut m3) = (0.0, 0.0);
                for i in pixels() {
                    let dv = lab[i][ch] - mean;
                    m2 += dv * dv;
                    m3 += dv * dv * dv;
                }
                values.push(mean);
                values.push(libm::sqrt(m2 / count));
                values.push(libm::cbrt(m3 / count));
            }
        }
    }
    Ok(FeatureVector::new(FeatureKind::Cm225, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_cover_everything() {
        for len in 5..40 {
            let b = block_bounds(len);
            assert_eq!(b[0], 0);
            assert_eq!(b[GRID], len);
            assert!(b.windows(2).all(|w| w[1] > w[0]));
        }
        assert_eq!(block_bounds(7), [0, 1, 3, 4, 6, 7]);
    }

    #[test]
    fn constant_image_moments() {
        let img = RgbImage::filled(13, 9, [12, 200, 77]).unwrap();
        let f = color_moments(&img).unwrap();
        let (l, a, b) = rgb_to_lab([12, 200, 77]);
        for block in f.values().chunks(9) {
            for (ch, expected) in [l, a, b].into_iter().enumerate() {
                assert!((block[3 * ch] - expected).abs() < 1e-9);
                assert_eq!(block[3 * ch + 1], 0.0);
                assert_eq!(block[3 * ch + 2], 0.0);
            }
        }
    }

    #[test]
    fn rejects_small_images() {
        assert!(color_moments(&RgbImage::filled(4, 10, [0, 0, 0]).unwrap()).is_err());
    }
}
