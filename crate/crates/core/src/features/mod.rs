//! Image descriptors: a 73-bin edge direction histogram, a 144-bin HSV color
//! auto-correlogram and 225 block-wise LAB color moments.

mod color;
mod correlogram;
mod edge;
mod moments;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

pub use color::{hsv_bin, rgb_to_hsv, rgb_to_lab, HSV_BINS};
pub use correlogram::{color_autocorrelogram, CORRELOGRAM_DISTANCES};
pub use edge::{edge_direction_histogram, CANNY_HIGH_PERCENTILE, CANNY_LOW_PERCENTILE, CANNY_SIGMA};
pub use moments::{block_bounds, color_moments, GRID};

/// An 8-bit RGB image, pixels stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ImageTooSmall {
                width,
                height,
                requirement: "at least one pixel",
            });
        }
        if pixels.len() != width * height {
            return Err(Error::ShapeMismatch {
                rows: height,
                cols: width,
                expected: width * height,
                found: pixels.len(),
            });
        }
        Ok(RgbImage { width, height, pixels })
    }

    /// Builds an image from interleaved RGB bytes.
    pub fn from_raw(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 3 * width * height {
            return Err(Error::ShapeMismatch {
                rows: height,
                cols: width,
                expected: 3 * width * height,
                found: bytes.len(),
            });
        }
        let pixels = bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        RgbImage::new(width, height, pixels)
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        RgbImage::new(width, height, alloc::vec![rgb; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [u8; 3]) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        RgbImage::new(width, height, pixels)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKind {
    /// 73-D edge direction histogram.
    Edh73,
    /// 144-D HSV color auto-correlogram.
    Corr144,
    /// 225-D block-wise LAB color moments.
    Cm225,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 3] = [FeatureKind::Edh73, FeatureKind::Corr144, FeatureKind::Cm225];

    /// Descriptor length.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        match self {
            FeatureKind::Edh73 => 73,
            FeatureKind::Corr144 => 144,
            FeatureKind::Cm225 => 225,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Edh73 => "edh73",
            FeatureKind::Corr144 => "corr144",
            FeatureKind::Cm225 => "cm225",
        }
    }

    pub fn extract(self, img: &RgbImage) -> Result<FeatureVector> {
        match self {
            FeatureKind::Edh73 => edge_direction_histogram(img),
            FeatureKind::Corr144 => color_autocorrelogram(img),
            FeatureKind::Cm225 => color_moments(img),
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "edh73" | "edh" | "edge" => Ok(FeatureKind::Edh73),
            "corr144" | "corr" | "correlogram" => Ok(FeatureKind::Corr144),
            "cm225" | "cm" | "moments" => Ok(FeatureKind::Cm225),
            _ => Err(Error::InvalidParameter {
                name: "feature kind",
                reason: format!("unknown feature kind `{s}` (expected edh73, corr144 or cm225)"),
            }),
        }
    }
}

/// A descriptor of fixed length for its kind.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    kind: FeatureKind,
    values: Vec<f64>,
}

impl FeatureVector {
    pub(crate) fn new(kind: FeatureKind, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), kind.len());
        FeatureVector { kind, values }
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}
