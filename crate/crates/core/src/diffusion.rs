//! Diffusion maps.
//!
//! A fully connected Gaussian-kernel graph over the points is turned into a
//! random walk. The walk's `t`-step transition rows define the diffusion
//! distance
//!
//! ```text
//! D_t(x_i, x_j)² = Σ_k (P^t[i][k] − P^t[j][k])² / φ₀(x_k),   φ₀ = m / Σ m,
//! ```
//!
//! with `m_i = Σ_j W[i][j]` the kernel degree. The embedding keeps the
//! principal non-trivial right eigenvectors `ψ` of `P`, scaled by `λᵗ`, so that
//! Euclidean distances between embedded points reproduce `D_t` once all
//! `n − 1` non-trivial coordinates are kept.
//!
//! `P` is not symmetric; its eigenpairs come from the symmetric conjugate
//! `S = M^{1/2} P M^{−1/2} = M^{−1/2} W M^{−1/2}` with `ψ = √(Σm)·M^{−1/2} u`.
//! That normalization gives `Σ_i φ₀(i) ψ(i)² = 1` and makes the trivial
//! eigenvector exactly the all-ones vector.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{DataMatrix, Matrix};
use crate::numerics::{fix_sign, pairwise_sq_dists, sq_dist, top_eigenpairs};
use crate::reducer::{Embedding, Method, Reducer};

/// Parameters of a diffusion-map embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmConfig {
    /// Gaussian kernel width; the kernel variance is `sigma²`.
    pub sigma: f64,
    /// Number of random-walk steps.
    pub t: u32,
    /// Target dimension.
    pub d: usize,
}

impl DmConfig {
    pub fn new(sigma: f64, d: usize) -> Self {
        DmConfig { sigma, t: 1, d }
    }

    pub fn with_t(mut self, t: u32) -> Self {
        self.t = t;
        self
    }

    /// Checks the configuration against a data set of `n` points.
    pub fn validate(&self, n: usize) -> Result<()> {
        check_sigma(self.sigma)?;
        check_t(self.t)?;
        if self.d == 0 {
            return Err(Error::InvalidParameter {
                name: "d",
                reason: "target dimension must be at least 1".into(),
            });
        }
        if n < self.d + 2 {
            return Err(Error::InvalidParameter {
                name: "d",
                reason: format!(
                    "diffusion maps need d <= n - 2 (d = {}, n = {n}): the trivial eigenvector is discarded",
                    self.d
                ),
            });
        }
        Ok(())
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "sigma",
            reason: format!("kernel width must be positive and finite, got {sigma}"),
        })
    }
}

fn check_t(t: u32) -> Result<()> {
    if t >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "t",
            reason: "time steps must be at least 1".into(),
        })
    }
}

/// Gaussian kernel `W`, its row-normalized random walk `P` and the degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovOperator {
    kernel: Matrix,
    transition: Matrix,
    degrees: Vec<f64>,
    sigma: f64,
}

impl MarkovOperator {
    /// The symmetric kernel `W`.
    pub fn kernel(&self) -> &Matrix {
        &self.kernel
    }

    /// The one-step transition matrix `P`.
    pub fn transition(&self) -> &Matrix {
        &self.transition
    }

    /// `m_i = Σ_j W[i][j]`.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Density weights `φ₀(x_k) = m_k / Σ_j m_j`.
    pub fn stationary(&self) -> Vec<f64> {
        let total: f64 = self.degrees.iter().sum();
        self.degrees.iter().map(|m| m / total).collect()
    }

    /// Row `i` of `P^t`, computed as `e_iᵀ P ⋯ P` without forming `P^t`.
    pub fn transition_row(&self, i: usize, t: u32) -> Result<Vec<f64>> {
        check_t(t)?;
        if i >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n(),
            });
        }
        let mut row = self.transition.row(i).to_vec();
        for _ in 1..t {
            row = self.transition.left_mul_vec(&row);
        }
        Ok(row)
    }
}

/// Builds `W[i][j] = exp(−‖x_i − x_j‖² / (2σ²))` and `P = rowwise W / m`.
///
/// Duplicate points are fine: their kernel entry is 1.
pub fn build_kernel(data: &DataMatrix, sigma: f64) -> Result<MarkovOperator> {
    check_sigma(sigma)?;
    let n = data.n();
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "data",
            reason: format!("need at least 2 points, got {n}"),
        });
    }
    let denom = 2.0 * sigma * sigma;
    let mut kernel = pairwise_sq_dists(data);
    for w in kernel.as_mut_slice() {
        *w = libm::exp(-*w / denom);
    }
    let degrees: Vec<f64> = (0..n).map(|i| kernel.row(i).iter().sum()).collect();
    let mut transition = kernel.clone();
    for (i, &m) in degrees.iter().enumerate() {
        let inv = 1.0 / m;
        transition.row_mut(i).iter_mut().for_each(|p| *p *= inv);
    }
    Ok(MarkovOperator {
        kernel,
        transition,
        degrees,
        sigma,
    })
}

/// `P^t` by repeated multiplication.
pub fn transition_power(op: &MarkovOperator, t: u32) -> Result<Matrix> {
    check_t(t)?;
    let mut out = op.transition.clone();
    for _ in 1..t {
        out = out.matmul(&op.transition)?;
    }
    Ok(out)
}

/// Diffusion distance between points `i` and `j` after `t` steps.
///
/// Only the two transition rows involved are computed.
pub fn diffusion_distance(op: &MarkovOperator, t: u32, i: usize, j: usize) -> Result<f64> {
    let ri = op.transition_row(i, t)?;
    let rj = op.transition_row(j, t)?;
    if i == j {
        return Ok(0.0);
    }
    let phi = op.stationary();
    let sum: f64 = ri
        .iter()
        .zip(&rj)
        .zip(&phi)
        .map(|((a, b), w)| (a - b) * (a - b) / w)
        .sum();
    Ok(libm::sqrt(sum))
}

/// The first `d` non-trivial diffusion coordinates of an operator.
///
/// Unlike [`embed`], `d` may go up to `n − 1`, i.e. every non-trivial mode.
/// Returns the coordinates and the retained eigenvalues `λ₂ … λ_{d+1}`.
pub fn diffusion_coordinates(op: &MarkovOperator, t: u32, d: usize) -> Result<(Matrix, Vec<f64>)> {
    check_t(t)?;
    let n = op.n();
    if d == 0 || d + 1 > n {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: format!("need 1 <= d <= n - 1 (d = {d}, n = {n})"),
        });
    }
    let inv_sqrt_m: Vec<f64> = op.degrees.iter().map(|&m| 1.0 / libm::sqrt(m)).collect();
    let mut conjugate = op.kernel.clone();
    for i in 0..n {
        let si = inv_sqrt_m[i];
        for (s, &sj) in conjugate.row_mut(i).iter_mut().zip(&inv_sqrt_m) {
            *s *= si * sj;
        }
    }
    let dec = top_eigenpairs(&conjugate, d + 1)?;
    let scale = libm::sqrt(op.degrees.iter().sum::<f64>());

    let mut coords = Matrix::zeros(n, d);
    let mut eigenvalues = Vec::with_capacity(d);
    for j in 0..d {
        let lambda = dec.eigenvalues[j + 1];
        let mut psi: Vec<f64> = dec
            .vector(j + 1)
            .iter()
            .zip(&inv_sqrt_m)
            .map(|(u, s)| scale * u * s)
            .collect();
        fix_sign(&mut psi);
        let weight = libm::pow(lambda, t as f64);
        for (i, p) in psi.iter().enumerate() {
            coords[(i, j)] = weight * p;
        }
        eigenvalues.push(lambda);
    }
    Ok((coords, eigenvalues))
}

/// Diffusion-map embedding of `data` into `config.d` dimensions.
pub fn embed(data: &DataMatrix, config: &DmConfig) -> Result<Embedding> {
    config.validate(data.n())?;
    let op = build_kernel(data, config.sigma)?;
    let (coords, eigenvalues) = diffusion_coordinates(&op, config.t, config.d)?;
    Ok(Embedding {
        coords,
        eigenvalues,
        method: Method::Dm,
        config: Reducer::Dm(*config),
    })
}

/// Nyström extension of a diffusion embedding to unseen points.
///
/// Each new point gets kernel weights to the training points with the
/// training `sigma`, row-normalized into transition probabilities `p`, and
/// coordinate `j` becomes `(1/λ_{j+1}) Σ_i p_i y_i[j]`. A training point maps
/// back onto its own coordinates.
pub fn nystrom_extend(
    train_embedding: &Embedding,
    train_data: &DataMatrix,
    new_points: &DataMatrix,
) -> Result<Embedding> {
    let Reducer::Dm(config) = train_embedding.config else {
        return Err(Error::InvalidParameter {
            name: "train_embedding",
            reason: format!(
                "Nyström extension needs a diffusion-map embedding, got {}",
                train_embedding.method
            ),
        });
    };
    if new_points.dim() != train_data.dim() {
        return Err(Error::DimensionMismatch {
            expected: train_data.dim(),
            found: new_points.dim(),
        });
    }
    let y = &train_embedding.coords;
    if y.rows() != train_data.n() {
        return Err(Error::DimensionMismatch {
            expected: y.rows(),
            found: train_data.n(),
        });
    }
    if let Some(pos) = train_embedding.eigenvalues.iter().position(|&l| l == 0.0) {
        return Err(Error::InvalidParameter {
            name: "train_embedding",
            reason: format!("retained eigenvalue {pos} is zero"),
        });
    }
    let denom = 2.0 * config.sigma * config.sigma;
    let d = y.cols();
    let mut coords = Matrix::zeros(new_points.n(), d);
    let mut weights = Vec::with_capacity(train_data.n());
    for q in 0..new_points.n() {
        let x = new_points.row(q);
        weights.clear();
        weights.extend((0..train_data.n()).map(|i| libm::exp(-sq_dist(x, train_data.row(i)) / denom)));
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "new_points",
                reason: format!("point {q} has zero kernel weight to every training point"),
            });
        }
        let out = coords.row_mut(q);
        for (i, w) in weights.iter().enumerate() {
            let p = w / total;
            for (o, &yij) in out.iter_mut().zip(y.row(i)) {
                *o += p * yij;
            }
        }
        for (o, lambda) in out.iter_mut().zip(&train_embedding.eigenvalues) {
            *o /= lambda;
        }
    }
    Ok(Embedding {
        coords,
        eigenvalues: train_embedding.eigenvalues.clone(),
        method: Method::Dm,
        config: train_embedding.config,
    })
}
