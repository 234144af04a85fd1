//! Dense symmetric eigensolver.
//!
//! The matrix is reduced to tridiagonal form with Householder reflections and
//! the tridiagonal eigenvalues are found with the implicit QL algorithm
//! (Wilkinson shifts). When most of the spectrum is requested the QL rotations
//! are accumulated into the full orthogonal basis; when only a few pairs are
//! needed the eigenvalues are found without vectors and the wanted vectors are
//! recovered by inverse iteration on the tridiagonal matrix and mapped back
//! through the reflectors, which keeps large kernels (n in the thousands) at
//! roughly one tridiagonalization worth of work.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::numerics::rng::SeededRng;

/// Relative asymmetry accepted by the solver.
const SYMMETRY_TOL: f64 = 1e-10;

/// Matrices up to this size always take the full-spectrum path.
const FULL_SOLVE_MAX_N: usize = 96;

const MAX_QL_SWEEPS_PER_VALUE: usize = 60;
const MAX_INVERSE_ITERATIONS: usize = 10;

/// Eigenpairs of a symmetric matrix.
///
/// Column `j` of `eigenvectors` is a unit vector paired with `eigenvalues[j]`.
/// Each column is sign-normalized so that its entry of largest magnitude
/// (first such entry on ties) is non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.eigenvectors.column(j)
    }
}

/// The `k` algebraically largest eigenpairs of a symmetric matrix, sorted by
/// descending eigenvalue. Equal eigenvalues keep the order in which the
/// solver produced them.
pub fn top_eigenpairs(a: &Matrix, k: usize) -> Result<SpectralDecomposition> {
    let n = validate_symmetric(a)?;
    if k == 0 || k > n {
        return Err(Error::TooManyEigenpairs { requested: k, n });
    }
    if n <= FULL_SOLVE_MAX_N || 4 * k >= n {
        full_solve(a, k)
    } else {
        partial_solve(a, k)
    }
}

/// The complete spectrum, descending.
pub fn symmetric_eigen(a: &Matrix) -> Result<SpectralDecomposition> {
    top_eigenpairs(a, a.rows())
}

/// The `k` algebraically smallest eigenpairs, sorted ascending.
///
/// Solved as the top of the shifted matrix `cI − A`, where `c` is the
/// Gershgorin upper bound of the spectrum of `A`.
pub fn bottom_eigenpairs(a: &Matrix, k: usize) -> Result<SpectralDecomposition> {
    let n = validate_symmetric(a)?;
    let shift = (0..n)
        .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut shifted = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            shifted[(i, j)] = -a[(i, j)];
        }
        shifted[(i, i)] += shift;
    }
    let mut dec = top_eigenpairs(&shifted, k)?;
    for lambda in dec.eigenvalues.iter_mut() {
        *lambda = shift - *lambda;
    }
    Ok(dec)
}

fn validate_symmetric(a: &Matrix) -> Result<usize> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyMatrix { rows: 0, cols: 0 });
    }
    if let Some(pos) = a.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: pos / n,
            col: pos % n,
        });
    }
    let tol = SYMMETRY_TOL * a.max_abs().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = (a[(i, j)] - a[(j, i)]).abs();
            if diff > tol {
                return Err(Error::NotSymmetric { i, j, diff });
            }
        }
    }
    Ok(n)
}

/// Negates `v` if its largest-magnitude entry is negative.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Householder reflector `I − tau·v·vᵀ` acting on indices `offset..n`.
struct Reflector {
    offset: usize,
    tau: f64,
    v: Vec<f64>,
}

/// `A = Q T Qᵀ` with `Q = H_0 H_1 ⋯`.
struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[i] = T[i][i+1]`; the last entry is zero.
    off: Vec<f64>,
    reflectors: Vec<Reflector>,
}

impl Tridiagonal {
    fn reduce(a: &Matrix) -> Tridiagonal {
        let n = a.rows();
        // Work on the exactly symmetric part.
        let mut w = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                w[(i, j)] = 0.5 * (a[(i, j)] + a[(j, i)]);
            }
        }
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        let mut p = vec![0.0; n];

        for j in 0..n.saturating_sub(2) {
            diag[j] = w[(j, j)];
            let m = n - j - 1;
            let x = &w.row(j)[j + 1..];
            let alpha = x[0];
            let tail: f64 = x[1..].iter().map(|v| v * v).sum();
            if tail == 0.0 {
                off[j] = alpha;
                continue;
            }
            let norm = libm::sqrt(alpha * alpha + tail);
            let beta = if alpha >= 0.0 { -norm } else { norm };
            let tau = (beta - alpha) / beta;
            let scale = 1.0 / (alpha - beta);
            let mut v = Vec::with_capacity(m);
            v.push(1.0);
            v.extend(x[1..].iter().map(|&xi| xi * scale));
            off[j] = beta;

            let base = j + 1;
            let p = &mut p[..m];
            for (r, pr) in p.iter_mut().enumerate() {
                *pr = tau * dot(&w.row(base + r)[base..], &v);
            }
            let k = -0.5 * tau * dot(p, &v);
            for (pr, &vr) in p.iter_mut().zip(&v) {
                *pr += k * vr;
            }
            // Trailing block: A ← A − v wᵀ − w vᵀ.
            for r in 0..m {
                let (vr, wr) = (v[r], p[r]);
                let row = &mut w.row_mut(base + r)[base..];
                for ((a_rc, &vc), &wc) in row.iter_mut().zip(&v).zip(p.iter()) {
                    *a_rc -= vr * wc + wr * vc;
                }
            }
            reflectors.push(Reflector { offset: base, tau, v });
        }
        if n >= 2 {
            diag[n - 2] = w[(n - 2, n - 2)];
            off[n - 2] = w[(n - 2, n - 1)];
        }
        diag[n - 1] = w[(n - 1, n - 1)];
        Tridiagonal { diag, off, reflectors }
    }

    /// `y ← Q y`.
    fn apply_q(&self, y: &mut [f64]) {
        for h in self.reflectors.iter().rev() {
            let seg = &mut y[h.offset..];
            let s = h.tau * dot(&h.v, seg);
            for (yi, &vi) in seg.iter_mut().zip(&h.v) {
                *yi -= s * vi;
            }
        }
    }

    /// `Qᵀ` as an explicit matrix (its rows are the columns of `Q`).
    fn q_transpose(&self, n: usize) -> Matrix {
        let mut m = Matrix::identity(n);
        let mut w = vec![0.0; n];
        for h in &self.reflectors {
            w.iter_mut().for_each(|x| *x = 0.0);
            for (r, &vr) in h.v.iter().enumerate() {
                for (wc, &mc) in w.iter_mut().zip(m.row(h.offset + r)) {
                    *wc += vr * mc;
                }
            }
            for (r, &vr) in h.v.iter().enumerate() {
                let f = h.tau * vr;
                for (mc, &wc) in m.row_mut(h.offset + r).iter_mut().zip(&w) {
                    *mc -= f * wc;
                }
            }
        }
        m
    }

    fn norm(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                self.diag[i].abs() + self.off[i].abs() + left
            })
            .fold(0.0, f64::max)
    }

    /// `‖T x − λ x‖₂`.
    fn residual(&self, x: &[f64], lambda: f64) -> f64 {
        let n = x.len();
        let mut acc = 0.0;
        for i in 0..n {
            let mut r = (self.diag[i] - lambda) * x[i] + self.off[i] * x.get(i + 1).copied().unwrap_or(0.0);
            if i > 0 {
                r += self.off[i - 1] * x[i - 1];
            }
            acc += r * r;
        }
        libm::sqrt(acc)
    }
}

/// Implicit QL with Wilkinson shifts on `(diag, off)`; on return `diag`
/// holds the eigenvalues (unsorted). When `vt` is given, its rows are rotated
/// along so that row `i` ends up as the eigenvector of `diag[i]`.
fn implicit_ql(diag: &mut [f64], off: &mut [f64], mut vt: Option<&mut Matrix>) -> Result<()> {
    let n = diag.len();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(diag[l].abs() + off[l].abs());
        let mut m = l;
        while m < n - 1 && off[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_SWEEPS_PER_VALUE {
                    return Err(Error::NoConvergence);
                }
                let g = diag[l];
                let mut p = (diag[l + 1] - g) / (2.0 * off[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                diag[l] = off[l] / (p + r);
                diag[l + 1] = off[l] * (p + r);
                let dl1 = diag[l + 1];
                let h = g - diag[l];
                for d in diag[l + 2..].iter_mut() {
                    *d -= h;
                }
                f += h;

                p = diag[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = off[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * off[i];
                    let h = c * p;
                    r = libm::hypot(p, off[i]);
                    off[i + 1] = s * r;
                    s = off[i] / r;
                    c = p / r;
                    p = c * diag[i] - s * g;
                    diag[i + 1] = h + s * (c * g + s * diag[i]);
                    if let Some(vt) = vt.as_deref_mut() {
                        rotate_rows(vt, i, c, s);
                    }
                }
                p = -s * s2 * c3 * el1 * off[l] / dl1;
                off[l] = s * p;
                diag[l] = c * p;
                if off[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        diag[l] += f;
        off[l] = 0.0;
    }
    Ok(())
}

#[inline]
fn rotate_rows(vt: &mut Matrix, i: usize, c: f64, s: f64) {
    let cols = vt.cols();
    let (head, tail) = vt.as_mut_slice().split_at_mut((i + 1) * cols);
    let ri = &mut head[i * cols..];
    let ri1 = &mut tail[..cols];
    for (a, b) in ri.iter_mut().zip(ri1.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}

/// Indices of `values` sorted descending; equal values keep index order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

fn full_solve(a: &Matrix, k: usize) -> Result<SpectralDecomposition> {
    let n = a.rows();
    let tri = Tridiagonal::reduce(a);
    let mut vt = tri.q_transpose(n);
    let mut diag = tri.diag.clone();
    let mut off = tri.off.clone();
    implicit_ql(&mut diag, &mut off, Some(&mut vt))?;
    let order = descending_order(&diag);
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Matrix::zeros(n, k);
    for (j, &idx) in order.iter().take(k).enumerate() {
        eigenvalues.push(diag[idx]);
        let mut v = vt.row(idx).to_vec();
        normalize(&mut v);
        fix_sign(&mut v);
        eigenvectors.set_column(j, &v);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn partial_solve(a: &Matrix, k: usize) -> Result<SpectralDecomposition> {
    let n = a.rows();
    let tri = Tridiagonal::reduce(a);
    let mut values = tri.diag.clone();
    let mut off = tri.off.clone();
    implicit_ql(&mut values, &mut off, None)?;
    let order = descending_order(&values);
    let selected: Vec<f64> = order.iter().take(k).map(|&i| values[i]).collect();

    let tridiagonal_vectors = inverse_iteration(&tri, &selected);
    let mut eigenvectors = Matrix::zeros(n, k);
    for (j, mut y) in tridiagonal_vectors.into_iter().enumerate() {
        tri.apply_q(&mut y);
        normalize(&mut y);
        fix_sign(&mut y);
        eigenvectors.set_column(j, &y);
    }
    Ok(SpectralDecomposition {
        eigenvalues: selected,
        eigenvectors,
    })
}

/// Eigenvectors of the tridiagonal matrix for the given (descending)
/// eigenvalues. Vectors whose eigenvalues sit within `1e-3·‖T‖` of their
/// predecessor form a cluster and are kept mutually orthogonal.
fn inverse_iteration(tri: &Tridiagonal, eigenvalues: &[f64]) -> Vec<Vec<f64>> {
    let n = tri.diag.len();
    let tnorm = tri.norm();
    let eps = f64::EPSILON;
    if tnorm == 0.0 {
        return (0..eigenvalues.len())
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                e
            })
            .collect();
    }
    let cluster_gap = 1e-3 * tnorm;
    let converged = 64.0 * eps * tnorm;
    let mut rng = SeededRng::new(0x5eed_1d1e);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(eigenvalues.len());
    let mut cluster_start = 0;
    let mut prev_shift = f64::INFINITY;

    for (idx, &lambda) in eigenvalues.iter().enumerate() {
        if idx > 0 && eigenvalues[idx - 1] - lambda > cluster_gap {
            cluster_start = idx;
        }
        // Repeated values get slightly separated shifts so each solve differs.
        let mut shift = lambda;
        if idx > cluster_start {
            let min_sep = 10.0 * eps * lambda.abs().max(tnorm);
            if prev_shift - shift < min_sep {
                shift = prev_shift - min_sep;
            }
        }
        prev_shift = shift;
        let lu = ShiftedTridiagonalLu::factor(tri, shift, eps * tnorm);

        let mut x: Vec<f64> = (0..n).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
        normalize(&mut x);
        for it in 0..MAX_INVERSE_ITERATIONS {
            lu.solve(&mut x);
            for q in &vectors[cluster_start..idx] {
                orthogonalize(&mut x, q);
            }
            if !normalize(&mut x) {
                x = (0..n).map(|_| rng.uniform_range(-1.0, 1.0)).collect();
                for q in &vectors[cluster_start..idx] {
                    orthogonalize(&mut x, q);
                }
                normalize(&mut x);
                continue;
            }
            if it >= 1 && tri.residual(&x, lambda) <= converged {
                break;
            }
        }
        vectors.push(x);
    }
    vectors
}

fn orthogonalize(x: &mut [f64], q: &[f64]) {
    // Two passes of classical Gram–Schmidt.
    for _ in 0..2 {
        let c = dot(x, q);
        for (xi, &qi) in x.iter_mut().zip(q) {
            *xi -= c * qi;
        }
    }
}

/// Scales `v` to unit norm; returns false when `v` is zero or not finite.
fn normalize(v: &mut [f64]) -> bool {
    let norm = libm::sqrt(dot(v, v));
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    let inv = 1.0 / norm;
    v.iter_mut().for_each(|x| *x *= inv);
    true
}

/// LU factorization with partial pivoting of `T − shift·I`.
struct ShiftedTridiagonalLu {
    /// Diagonal of U.
    d: Vec<f64>,
    /// First superdiagonal of U.
    du: Vec<f64>,
    /// Second superdiagonal of U (fill-in from pivoting).
    du2: Vec<f64>,
    /// Multipliers.
    dl: Vec<f64>,
    swapped: Vec<bool>,
    tiny: f64,
}

impl ShiftedTridiagonalLu {
    fn factor(tri: &Tridiagonal, shift: f64, tiny: f64) -> Self {
        let n = tri.diag.len();
        let mut d: Vec<f64> = tri.diag.iter().map(|&x| x - shift).collect();
        let mut du: Vec<f64> = tri.off[..n.saturating_sub(1)].to_vec();
        let mut dl = du.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                } else {
                    dl[i] = 0.0;
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        ShiftedTridiagonalLu {
            d,
            du,
            du2,
            dl,
            swapped,
            tiny,
        }
    }

    #[inline]
    fn pivot(&self, i: usize) -> f64 {
        let p = self.d[i];
        if p.abs() < self.tiny {
            if p < 0.0 {
                -self.tiny
            } else {
                self.tiny
            }
        } else {
            p
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            if i + 1 < n {
                acc -= self.du[i] * b[i + 1];
            }
            if i + 2 < n {
                acc -= self.du2[i] * b[i + 2];
            }
            b[i] = acc / self.pivot(i);
        }
    }
}
