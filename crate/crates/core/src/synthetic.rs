//! Benchmark manifolds with known intrinsic coordinates, and a
//! neighborhood-preservation score for embeddings of them.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{Error, Result};
use crate::matrix::{DataMatrix, Matrix};
use crate::numerics::{nearest_rows, seeded_rng};

/// Polar extent of the punctured sphere, measured from the bottom pole:
/// `z = −cos θ` reaches `1/2` at `θ = 2π/3`, leaving the bottom three quarters
/// of the sphere's height.
pub const SPHERE_RIM_POLAR: f64 = 2.0 * PI / 3.0;

/// Density ramp `floor + (1 − floor)·θ/θ_rim` multiplying `sin θ`.
pub const SPHERE_RAMP_FLOOR: f64 = 0.2;

const MIN_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    SwissRoll,
    PuncturedSphere,
}

impl SyntheticKind {
    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::SwissRoll => "swiss_roll",
            SyntheticKind::PuncturedSphere => "punctured_sphere",
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swiss_roll" | "swiss-roll" => Ok(SyntheticKind::SwissRoll),
            "punctured_sphere" | "punctured-sphere" => Ok(SyntheticKind::PuncturedSphere),
            _ => Err(Error::InvalidParameter {
                name: "name",
                reason: format!("unknown data set `{s}` (expected swiss_roll or punctured_sphere)"),
            }),
        }
    }
}

/// A sampled 3-D point cloud with its 2-D ground-truth coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSample {
    /// n×3.
    pub points: DataMatrix,
    /// n×2.
    pub intrinsic: Matrix,
    pub kind: SyntheticKind,
    pub seed: u64,
}

impl SyntheticSample {
    pub fn n(&self) -> usize {
        self.points.n()
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < MIN_POINTS {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("need at least {MIN_POINTS} points, got {n}"),
        });
    }
    Ok(())
}

/// Swiss roll: `(s cos s, h, s sin s)` with `s` uniform on `[3π/2, 9π/2]`
/// and `h` uniform on `[0, 21]`. Intrinsic coordinates are `(s, h)`.
pub fn swiss_roll(n: usize, seed: u64) -> Result<SyntheticSample> {
    check_n(n)?;
    let mut rng = seeded_rng(seed);
    let mut points = Vec::with_capacity(3 * n);
    let mut intrinsic = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let s = 1.5 * PI * (1.0 + 2.0 * rng.uniform());
        let h = 21.0 * rng.uniform();
        points.extend_from_slice(&[s * libm::cos(s), h, s * libm::sin(s)]);
        intrinsic.extend_from_slice(&[s, h]);
    }
    Ok(SyntheticSample {
        points: DataMatrix::new(n, 3, points)?,
        intrinsic: Matrix::from_vec(n, 2, intrinsic)?,
        kind: SyntheticKind::SwissRoll,
        seed,
    })
}

/// Punctured sphere: the bottom three quarters of the unit sphere, with the
/// vertical axis stretched by `height_scale`.
///
/// The polar angle `θ` (from the bottom pole) is drawn on `[0, 2π/3]` with
/// density proportional to `sin θ · (0.2 + 0.8·θ/(2π/3))` by rejection
/// sampling, so points are sparsest at the bottom and densest at the rim;
/// the azimuth `φ` is uniform. Points are
/// `(sin θ cos φ, sin θ sin φ, −height_scale·cos θ)`.
///
/// The intrinsic coordinates are the geodesic polar pair laid out in the
/// plane, `(θ cos φ, θ sin φ)`: concentric circles around the bottom pole,
/// which avoids the seam at `φ = 0` and the pole singularity of raw `(φ, θ)`.
pub fn punctured_sphere(n: usize, height_scale: f64, seed: u64) -> Result<SyntheticSample> {
    check_n(n)?;
    if !(height_scale > 0.0 && height_scale.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "height_scale",
            reason: format!("must be positive, got {height_scale}"),
        });
    }
    let mut rng = seeded_rng(seed);
    let mut points = Vec::with_capacity(3 * n);
    let mut intrinsic = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let theta = loop {
            let theta = SPHERE_RIM_POLAR * rng.uniform();
            let ramp = SPHERE_RAMP_FLOOR + (1.0 - SPHERE_RAMP_FLOOR) * theta / SPHERE_RIM_POLAR;
            // sin θ · ramp ≤ 1 on the whole range.
            if rng.uniform() < libm::sin(theta) * ramp {
                break theta;
            }
        };
        let phi = 2.0 * PI * rng.uniform();
        let (st, ct) = (libm::sin(theta), libm::cos(theta));
        points.extend_from_slice(&[st * libm::cos(phi), st * libm::sin(phi), -height_scale * ct]);
        intrinsic.extend_from_slice(&[theta * libm::cos(phi), theta * libm::sin(phi)]);
    }
    Ok(SyntheticSample {
        points: DataMatrix::new(n, 3, points)?,
        intrinsic: Matrix::from_vec(n, 2, intrinsic)?,
        kind: SyntheticKind::PuncturedSphere,
        seed,
    })
}

/// Mean fraction of each point's `k_eval` nearest neighbors in `embedding`
/// that are also among its `k_eval` nearest neighbors in `intrinsic`.
///
/// 1.0 means every local neighborhood survived. Neighbor ties go to the lower
/// index in both spaces.
pub fn embedding_quality(embedding: &Matrix, intrinsic: &Matrix, k_eval: usize) -> Result<f64> {
    let n = embedding.rows();
    if intrinsic.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: intrinsic.rows(),
        });
    }
    if k_eval == 0 || k_eval >= n {
        return Err(Error::InvalidParameter {
            name: "k_eval",
            reason: format!("need 1 <= k_eval < n (k_eval = {k_eval}, n = {n})"),
        });
    }
    let mut total = 0.0;
    let mut marks = alloc::vec![usize::MAX; n];
    for i in 0..n {
        for j in nearest_rows(intrinsic, i, k_eval) {
            marks[j] = i;
        }
        let shared = nearest_rows(embedding, i, k_eval)
            .into_iter()
            .filter(|&j| marks[j] == i)
            .count();
        total += shared as f64 / k_eval as f64;
    }
    Ok(total / n as f64)
}
