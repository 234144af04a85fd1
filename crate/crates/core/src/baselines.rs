//! Comparison reducers: PCA, locally linear embedding (LLE) and Laplacian
//! eigenmaps (LEM).
//!
//! LLE and LEM need the bottom of a spectrum; both go through
//! [`bottom_eigenpairs`], i.e. the top of a shifted matrix.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{dot, DataMatrix, Matrix};
use crate::numerics::{bottom_eigenpairs, fix_sign, nearest_rows, sq_dist, top_eigenpairs, SpectralDecomposition};
use crate::reducer::{Embedding, Method, Reducer};

pub const DEFAULT_KNN: usize = 12;
pub const DEFAULT_LLE_REG: f64 = 1e-3;

/// Hyperparameters shared by the neighborhood-graph baselines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub d: usize,
    /// Neighborhood size.
    pub k_nn: usize,
    /// Heat-kernel width for LEM; `None` uses the mean k-NN distance.
    pub lem_sigma: Option<f64>,
    /// LLE Tikhonov regularization, relative to the local Gram trace.
    pub lle_reg: f64,
}

impl BaselineConfig {
    pub fn new(d: usize) -> Self {
        BaselineConfig {
            d,
            k_nn: DEFAULT_KNN,
            lem_sigma: None,
            lle_reg: DEFAULT_LLE_REG,
        }
    }

    pub fn with_knn(mut self, k_nn: usize) -> Self {
        self.k_nn = k_nn;
        self
    }

    fn check_common(&self, n: usize) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("d", "target dimension must be at least 1".into()));
        }
        if self.k_nn == 0 || self.k_nn >= n {
            return Err(invalid(
                "k_nn",
                format!("need 1 <= k_nn < n (k_nn = {}, n = {n})", self.k_nn),
            ));
        }
        if self.d + 1 > n {
            return Err(invalid("d", format!("need d <= n - 1 (d = {}, n = {n})", self.d)));
        }
        Ok(())
    }
}

fn invalid(name: &'static str, reason: alloc::string::String) -> Error {
    Error::InvalidParameter { name, reason }
}

/// A fitted principal component basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaFit {
    pub mean: Vec<f64>,
    /// D×d, orthonormal columns.
    pub components: Matrix,
    /// Variance captured by each component, descending.
    pub variances: Vec<f64>,
}

impl PcaFit {
    /// Projects rows onto the components.
    pub fn transform(&self, data: &DataMatrix) -> Result<Matrix> {
        if data.dim() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                found: data.dim(),
            });
        }
        let d = self.components.cols();
        let mut out = Matrix::zeros(data.n(), d);
        let mut centered = vec![0.0; data.dim()];
        for i in 0..data.n() {
            for ((c, x), m) in centered.iter_mut().zip(data.row(i)).zip(&self.mean) {
                *c = x - m;
            }
            let proj = self.components.left_mul_vec(&centered);
            out.row_mut(i).copy_from_slice(&proj);
        }
        Ok(out)
    }

    /// Maps reduced coordinates back to the ambient space.
    pub fn reconstruct(&self, coords: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(coords.rows(), self.mean.len());
        for i in 0..coords.rows() {
            let row = self.components.mul_vec(coords.row(i));
            for ((o, r), m) in out.row_mut(i).iter_mut().zip(row).zip(&self.mean) {
                *o = r + m;
            }
        }
        out
    }
}

/// Top-`d` eigenvectors of the sample covariance (divisor `n − 1`).
pub fn fit_pca(data: &DataMatrix, d: usize) -> Result<PcaFit> {
    let (n, dim) = (data.n(), data.dim());
    if n < 2 {
        return Err(invalid("data", format!("PCA needs at least 2 points, got {n}")));
    }
    if d == 0 || d > (n - 1).min(dim) {
        return Err(invalid(
            "d",
            format!("PCA needs 1 <= d <= min(n - 1, D) = {} (d = {d})", (n - 1).min(dim)),
        ));
    }
    let mut mean = vec![0.0; dim];
    for i in 0..n {
        for (m, x) in mean.iter_mut().zip(data.row(i)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = Matrix::zeros(dim, dim);
    let mut centered = vec![0.0; dim];
    for i in 0..n {
        for ((c, x), m) in centered.iter_mut().zip(data.row(i)).zip(&mean) {
            *c = x - m;
        }
        for a in 0..dim {
            let ca = centered[a];
            if ca == 0.0 {
                continue;
            }
            for (v, &cb) in cov.row_mut(a)[a..].iter_mut().zip(&centered[a..]) {
                *v += ca * cb;
            }
        }
    }
    let scale = 1.0 / (n - 1) as f64;
    for a in 0..dim {
        for b in a..dim {
            let v = cov[(a, b)] * scale;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    let dec = top_eigenpairs(&cov, d)?;
    Ok(PcaFit {
        mean,
        components: dec.eigenvectors,
        variances: dec.eigenvalues,
    })
}

/// Centered data projected on the top-`d` principal directions.
pub fn embed_pca(data: &DataMatrix, d: usize) -> Result<Embedding> {
    let fit = fit_pca(data, d)?;
    let coords = fit.transform(data)?;
    Ok(Embedding {
        coords,
        eigenvalues: fit.variances,
        method: Method::Pca,
        config: Reducer::Pca { d },
    })
}

/// Sparse LLE reconstruction weights: for every point, its neighbors and the
/// affine weights (summing to 1) that best reconstruct it from them.
pub fn lle_weights(data: &DataMatrix, config: &BaselineConfig) -> Result<Vec<Vec<(usize, f64)>>> {
    let n = data.n();
    config.check_common(n)?;
    if config.k_nn < config.d + 1 {
        return Err(invalid(
            "k_nn",
            format!("LLE needs k_nn >= d + 1 (k_nn = {}, d = {})", config.k_nn, config.d),
        ));
    }
    if !(config.lle_reg >= 0.0 && config.lle_reg.is_finite()) {
        return Err(invalid("lle_reg", format!("must be >= 0, got {}", config.lle_reg)));
    }
    let k = config.k_nn;
    let points = data.as_matrix();
    let mut out = Vec::with_capacity(n);
    let mut diffs = Matrix::zeros(k, data.dim());
    for i in 0..n {
        let nbrs = nearest_rows(points, i, k);
        let xi = data.row(i);
        for (r, &j) in nbrs.iter().enumerate() {
            for ((dst, a), b) in diffs.row_mut(r).iter_mut().zip(data.row(j)).zip(xi) {
                *dst = a - b;
            }
        }
        let mut gram = Matrix::zeros(k, k);
        for a in 0..k {
            for b in a..k {
                let g = dot(diffs.row(a), diffs.row(b));
                gram[(a, b)] = g;
                gram[(b, a)] = g;
            }
        }
        let trace: f64 = (0..k).map(|a| gram[(a, a)]).sum();
        // A zero trace means every neighbor coincides with the point.
        let base = if trace > 0.0 { trace } else { 1.0 };
        let reg = (config.lle_reg * base).max(1e-12 * base);
        for a in 0..k {
            gram[(a, a)] += reg;
        }
        let mut w = solve_dense(gram, vec![1.0; k]);
        let total: f64 = w.iter().sum();
        if total.is_finite() && total != 0.0 {
            w.iter_mut().for_each(|x| *x /= total);
        } else {
            w = vec![1.0 / k as f64; k];
        }
        out.push(nbrs.into_iter().zip(w).collect());
    }
    Ok(out)
}

/// `(I − W)ᵀ (I − W)` for sparse LLE weights.
pub fn lle_alignment_matrix(weights: &[Vec<(usize, f64)>]) -> Matrix {
    let n = weights.len();
    let mut m = Matrix::identity(n);
    for (r, row) in weights.iter().enumerate() {
        for &(j, w) in row {
            m[(r, j)] -= w;
            m[(j, r)] -= w;
        }
        for &(a, wa) in row {
            for &(b, wb) in row {
                m[(a, b)] += wa * wb;
            }
        }
    }
    m
}

/// Locally linear embedding: bottom `d + 1` eigenvectors of the alignment
/// matrix with the constant one dropped.
pub fn embed_lle(data: &DataMatrix, config: &BaselineConfig) -> Result<Embedding> {
    let weights = lle_weights(data, config)?;
    let m = lle_alignment_matrix(&weights);
    let dec = bottom_eigenpairs(&m, config.d + 1)?;
    let mut coords = Matrix::zeros(data.n(), config.d);
    for j in 0..config.d {
        coords.set_column(j, &dec.vector(j + 1));
    }
    Ok(Embedding {
        coords,
        eigenvalues: dec.eigenvalues[1..].to_vec(),
        method: Method::Lle,
        config: Reducer::Lle(*config),
    })
}

/// Symmetrized k-NN graph with heat-kernel weights, as a dense matrix.
///
/// An edge exists if either endpoint lists the other among its `k_nn`
/// nearest neighbors. Returns the weights and the kernel width used.
pub fn lem_graph(data: &DataMatrix, config: &BaselineConfig) -> Result<(Matrix, f64)> {
    let n = data.n();
    config.check_common(n)?;
    if let Some(s) = config.lem_sigma {
        if !(s > 0.0 && s.is_finite()) {
            return Err(invalid("lem_sigma", format!("must be positive, got {s}")));
        }
    }
    let points = data.as_matrix();
    let nbrs: Vec<Vec<usize>> = (0..n).map(|i| nearest_rows(points, i, config.k_nn)).collect();
    let sigma = match config.lem_sigma {
        Some(s) => s,
        None => {
            let mut total = 0.0;
            for (i, list) in nbrs.iter().enumerate() {
                for &j in list {
                    total += libm::sqrt(sq_dist(data.row(i), data.row(j)));
                }
            }
            let mean = total / (n * config.k_nn) as f64;
            if mean > 0.0 {
                mean
            } else {
                1.0
            }
        }
    };
    let denom = 2.0 * sigma * sigma;
    let mut w = Matrix::zeros(n, n);
    for (i, list) in nbrs.iter().enumerate() {
        for &j in list {
            let v = libm::exp(-sq_dist(data.row(i), data.row(j)) / denom);
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    Ok((w, sigma))
}

fn connected_components(adjacency: &Matrix) -> usize {
    let n = adjacency.rows();
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let mut components = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            for (j, &w) in adjacency.row(i).iter().enumerate() {
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    components
}

/// The `count` smallest generalized eigenpairs of `L v = λ Diag(deg) v`
/// for the LEM graph, ascending, with `vᵀ Diag(deg) v = 1`.
pub fn lem_spectrum(data: &DataMatrix, config: &BaselineConfig, count: usize) -> Result<SpectralDecomposition> {
    let (w, _) = lem_graph(data, config)?;
    let n = w.rows();
    let components = connected_components(&w);
    if components > 1 {
        return Err(Error::DisconnectedGraph { components });
    }
    let deg: Vec<f64> = (0..n).map(|i| w.row(i).iter().sum()).collect();
    let inv_sqrt: Vec<f64> = deg.iter().map(|&g| 1.0 / libm::sqrt(g)).collect();
    // Normalized Laplacian I − D^{-1/2} W D^{-1/2}.
    let mut lap = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            lap[(i, j)] = -w[(i, j)] * inv_sqrt[i] * inv_sqrt[j];
        }
        lap[(i, i)] += 1.0;
    }
    let mut dec = bottom_eigenpairs(&lap, count)?;
    for j in 0..dec.len() {
        let mut v: Vec<f64> = dec.vector(j).iter().zip(&inv_sqrt).map(|(u, s)| u * s).collect();
        fix_sign(&mut v);
        dec.eigenvectors.set_column(j, &v);
    }
    Ok(dec)
}

/// Laplacian eigenmaps: the `d` generalized eigenvectors with the smallest
/// non-trivial eigenvalues.
pub fn embed_lem(data: &DataMatrix, config: &BaselineConfig) -> Result<Embedding> {
    let dec = lem_spectrum(data, config, config.d + 1)?;
    let mut coords = Matrix::zeros(data.n(), config.d);
    for j in 0..config.d {
        coords.set_column(j, &dec.vector(j + 1));
    }
    Ok(Embedding {
        coords,
        eigenvalues: dec.eigenvalues[1..].to_vec(),
        method: Method::Lem,
        config: Reducer::Lem(*config),
    })
}

/// Gaussian elimination with partial pivoting; zero pivots are nudged.
fn solve_dense(mut a: Matrix, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if a[(r, col)].abs() > a[(piv, col)].abs() {
                piv = r;
            }
        }
        if piv != col {
            for c in 0..n {
                let tmp = a[(col, c)];
                a[(col, c)] = a[(piv, c)];
                a[(piv, c)] = tmp;
            }
            b.swap(col, piv);
        }
        if a[(col, col)] == 0.0 {
            a[(col, col)] = f64::EPSILON * scale;
        }
        let p = a[(col, col)];
        for r in (col + 1)..n {
            let f = a[(r, col)] / p;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[(r, c)] -= f * a[(col, c)];
            }
            b[r] -= f * b[col];
        }
    }
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in (r + 1)..n {
            acc -= a[(r, c)] * b[c];
        }
        b[r] = acc / a[(r, r)];
    }
    b
}
