//! Edge direction histogram.
//!
//! Edges come from a Canny detector on the luminance image: Gaussian blur,
//! Sobel gradients, non-maximum suppression and hysteresis. Each edge pixel
//! votes for the 5° bin of its Sobel gradient direction; the 73rd bin holds the
//! fraction of non-edge pixels.

use alloc::vec;
use alloc::vec::Vec;

use super::{FeatureKind, FeatureVector, RgbImage};
use crate::error::{Error, Result};

pub const CANNY_SIGMA: f64 = 1.4;
pub const CANNY_LOW_PERCENTILE: f64 = 0.70;
pub const CANNY_HIGH_PERCENTILE: f64 = 0.90;

const DIRECTION_BINS: usize = 72;
const BIN_DEGREES: f64 = 5.0;

fn luminance(img: &RgbImage) -> Vec<f64> {
    img.pixels()
        .iter()
        .map(|&[r, g, b]| 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64)
        .collect()
}

#[inline]
fn clamp_index(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}

/// Separable Gaussian blur with edge replication.
fn gaussian_blur(src: &[f64], width: usize, height: usize, sigma: f64) -> Vec<f64> {
    let radius = libm::ceil(3.0 * sigma) as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|o| libm::exp(-((o * o) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= total);

    let mut tmp = vec![0.0; src.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (k, o) in kernel.iter().zip(-radius..=radius) {
                acc += k * src[y * width + clamp_index(x as isize + o, width)];
            }
            tmp[y * width + x] = acc;
        }
    }
    let mut out = vec![0.0; src.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (k, o) in kernel.iter().zip(-radius..=radius) {
                acc += k * tmp[clamp_index(y as isize + o, height) * width + x];
            }
            out[y * width + x] = acc;
        }
    }
    out
}

/// Sobel gradients `(gx, gy)` with edge replication; `y` grows downwards.
fn sobel(src: &[f64], width: usize, height: usize) -> (Vec<f64>, Vec<f64>) {
    let at = |x: isize, y: isize| src[clamp_index(y, height) * width + clamp_index(x, width)];
    let mut gx = vec![0.0; src.len()];
    let mut gy = vec![0.0; src.len()];
    for y in 0..height as isize {
        for x in 0..width as isize {
            let i = y as usize * width + x as usize;
            gx[i] = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            gy[i] = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
        }
    }
    (gx, gy)
}

/// Nearest-rank percentile.
fn percentile(values: &[f64], p: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let rank = libm::ceil(p * sorted.len() as f64) as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Gradient direction in degrees, `[0, 360)`.
pub(crate) fn direction_degrees(gx: f64, gy: f64) -> f64 {
    let deg = libm::atan2(gy, gx).to_degrees();
    let deg = if deg < 0.0 { deg + 360.0 } else { deg };
    if deg >= 360.0 {
        0.0
    } else {
        deg
    }
}

/// Canny edge map plus the Sobel gradients of the smoothed image.
pub(crate) fn canny(img: &RgbImage) -> (Vec<bool>, Vec<f64>, Vec<f64>) {
    let (w, h) = (img.width(), img.height());
    let smooth = gaussian_blur(&luminance(img), w, h, CANNY_SIGMA);
    let (gx, gy) = sobel(&smooth, w, h);
    let mag: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| libm::hypot(*a, *b)).collect();

    let mag_at = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            mag[y as usize * w + x as usize]
        }
    };
    // Non-maximum suppression along the gradient, quantized to 45°. The
    // forward neighbor must be strictly smaller so a flat two-pixel ridge
    // keeps exactly one pixel.
    let mut thin = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let m = mag[i];
            if m == 0.0 {
                continue;
            }
            let angle = direction_degrees(gx[i], gy[i]) % 180.0;
            let (dx, dy) = if !(22.5..157.5).contains(&angle) {
                (1, 0)
            } else if angle < 67.5 {
                (1, 1)
            } else if angle < 112.5 {
                (0, 1)
            } else {
                (-1, 1)
            };
            let (xi, yi) = (x as isize, y as isize);
            if m > mag_at(xi + dx, yi + dy) && m >= mag_at(xi - dx, yi - dy) {
                thin[i] = true;
            }
        }
    }

    let low = percentile(&mag, CANNY_LOW_PERCENTILE);
    let high = percentile(&mag, CANNY_HIGH_PERCENTILE);
    let mut edges = vec![false; w * h];
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..w * h {
        if thin[i] && mag[i] >= high {
            edges[i] = true;
            stack.push(i);
        }
    }
    while let Some(i) = stack.pop() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !edges[j] && thin[j] && mag[j] >= low {
                    edges[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    (edges, gx, gy)
}

/// 73-bin edge direction histogram.
///
/// Bins 0–71 hold the fraction of edge pixels whose gradient direction falls
/// in `[5i°, 5(i+1)°)` (all zero when the image has no edges); bin 72 is the
/// fraction of pixels that are not edges.
pub fn edge_direction_histogram(img: &RgbImage) -> Result<FeatureVector> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            requirement: "at least 3x3 pixels (Sobel window)",
        });
    }
    let (edges, gx, gy) = canny(img);
    let mut hist = vec![0.0; DIRECTION_BINS + 1];
    let mut edge_count = 0usize;
    for (i, _) in edges.iter().enumerate().filter(|(_, &e)| e) {
        let bin = ((direction_degrees(gx[i], gy[i]) / BIN_DEGREES) as usize).min(DIRECTION_BINS - 1);
        hist[bin] += 1.0;
        edge_count += 1;
    }
    if edge_count > 0 {
        let inv = 1.0 / edge_count as f64;
        hist[..DIRECTION_BINS].iter_mut().for_each(|v| *v *= inv);
    }
    let total = (w * h) as f64;
    hist[DIRECTION_BINS] = (w * h - edge_count) as f64 / total;
    Ok(FeatureVector::new(FeatureKind::Edh73, hist))
}
