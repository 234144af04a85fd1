//! HSV color auto-correlogram.

use alloc::vec;

use super::color::{hsv_bin, HSV_BINS};
use super::{FeatureKind, FeatureVector, RgbImage};
use crate::error::{Error, Result};

/// Chessboard distances at which color self-correlation is measured.
pub const CORRELOGRAM_DISTANCES: [usize; 4] = [1, 3, 5, 7];

/// 144-D auto-correlogram, bin-major: entry `4c + k` is the probability that
/// a pixel at chessboard distance `CORRELOGRAM_DISTANCES[k]` from a pixel of
/// quantized color `c` also has color `c`.
///
/// Pairs whose second pixel falls outside the image are not counted. A color
/// that never occurs (or has no in-image partner at some distance) gets 0.
/// The largest distance must fit inside the image, i.e. `max(w, h) ≥ 8`.
pub fn color_autocorrelogram(img: &RgbImage) -> Result<FeatureVector> {
    let (w, h) = (img.width(), img.height());
    let max_d = CORRELOGRAM_DISTANCES[CORRELOGRAM_DISTANCES.len() - 1];
    if w.max(h) <= max_d {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            requirement: "a side longer than 7 pixels",
        });
    }
    let bins: alloc::vec::Vec<usize> = img.pixels().iter().map(|&p| hsv_bin(p)).collect();
    let nd = CORRELOGRAM_DISTANCES.len();
    let mut same = vec![0u64; HSV_BINS * nd];
    let mut total = vec![0u64; HSV_BINS * nd];

    for y in 0..h as isize {
        for x in 0..w as isize {
            let c = bins[y as usize * w + x as usize];
            for (k, &d) in CORRELOGRAM_DISTANCES.iter().enumerate() {
                let d = d as isize;
                let mut hits = 0u64;
                let mut count = 0u64;
                let mut visit = |px: isize, py: isize| {
                    if px >= 0 && py >= 0 && px < w as isize && py < h as isize {
                        count += 1;
                        if bins[py as usize * w + px as usize] == c {
                            hits += 1;
                        }
                    }
                };
                // The ring at chessboard distance d: top and bottom rows in
                // full, left and right columns without the corners.
                for px in (x - d)..=(x + d) {
                    visit(px, y - d);
                    visit(px, y + d);
                }
                for py in (y - d + 1)..=(y + d - 1) {
                    visit(x - d, py);
                    visit(x + d, py);
                }
                same[c * nd + k] += hits;
                total[c * nd + k] += count;
            }
        }
    }
    let values = same
        .iter()
        .zip(&total)
        .map(|(&s, &t)| if t == 0 { 0.0 } else { s as f64 / t as f64 })
        .collect();
    Ok(FeatureVector::new(FeatureKind::Corr144, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solid_color_is_one_in_its_bin() {
        let img = RgbImage::filled(15, 15, [200, 30, 30]).unwrap();
        let f = color_autocorrelogram(&img).unwrap();
        let c = hsv_bin([200, 30, 30]);
        for (i, &v) in f.values().iter().enumerate() {
            let expected = if i / 4 == c { 1.0 } else { 0.0 };
            assert_eq!(v, expected);
        }
    }

    #[test]
    fn rejects_small_images() {
        let img = RgbImage::filled(7, 7, [0, 0, 0]).unwrap();
        assert!(color_autocorrelogram(&img).is_err());
        let img = RgbImage::filled(8, 2, [0, 0, 0]).unwrap();
        assert!(color_autocorrelogram(&img).is_ok());
    }

    #[test]
    fn entries_are_probabilities() {
        let img = RgbImage::from_fn(17, 19, |x, y| {
            [(x * 37 % 256) as u8, (y * 91 % 256) as u8, ((x * y) % 256) as u8]
        })
        .unwrap();
        let f = color_autocorrelogram(&img).unwrap();
        assert!(f.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
